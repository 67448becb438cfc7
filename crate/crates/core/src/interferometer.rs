//! Passive linear-optical networks as unitary matrices.
//!
//! An interferometer with matrix `L` maps input creation operators as
//! `a_i^dagger -> sum_k L[k][i] a_k^dagger`: column `i` describes where input
//! mode `i` goes, row `k` collects everything arriving at output mode `k`.
//! Applying `A` and then `B` gives the matrix `B * A`.
//!
//! Beam splitters follow
//!
//! ```text
//! [ e^{i phi} cos(theta)   -sin(theta)            ]
//! [ sin(theta)              e^{-i phi} cos(theta) ]
//! ```
//!
//! and the *reflectivity* of a beam splitter is `cos^2(theta)`, the
//! probability that a photon stays in its own mode index.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permanent::ComplexMatrix;

/// Maximum entrywise deviation of `L^dagger L` from the identity accepted for
/// an interferometer.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Threshold on the residual norm when completing rows; smaller residuals are
/// treated as linearly dependent.
const COMPLETION_RESIDUAL: [f64; 2] = [1e-3, 1e-9];

/// How an interferometer was built. Mode indices recorded here are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Identity,
    Explicit,
    BeamSplitter {
        theta: f64,
        phi: f64,
    },
    PhaseShifts {
        phases: Vec<f64>,
    },
    Embedded {
        modes: [usize; 2],
        inner: Box<Provenance>,
    },
    /// Elements listed in the order light passes through them.
    Sequence {
        parts: Vec<Provenance>,
    },
    Completion {
        given_rows: usize,
    },
    Haar {
        seed: u64,
    },
    HaarStream,
    Scheme {
        name: String,
        params: Vec<(String, f64)>,
    },
}

/// An `N`-mode passive network.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    matrix: ComplexMatrix,
    provenance: Provenance,
}

impl Interferometer {
    /// Wrap a unitary matrix, checking unitarity to [`UNITARITY_TOL`].
    pub fn new(matrix: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::NonSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix, provenance })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n_modes),
            provenance: Provenance::Identity,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `L[output][input]`, 0-based.
    pub fn element(&self, output: usize, input: usize) -> Complex64 {
        self.matrix[(output, input)]
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Two-mode beam splitter with transmission angle `theta` and phase `phi`.
    pub fn beam_splitter(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        let data = vec![
            e * c,
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            e.conj() * c,
        ];
        Self {
            matrix: ComplexMatrix::from_row_major(2, 2, data).expect("2x2"),
            provenance: Provenance::BeamSplitter { theta, phi },
        }
    }

    /// Beam splitter with the given reflectivity `cos^2(theta)` and `phi`.
    pub fn beam_splitter_with_reflectivity(reflectivity: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::BadParameters(format!(
                "reflectivity {reflectivity} outside [0, 1]"
            )));
        }
        Ok(Self::beam_splitter(reflectivity.sqrt().acos(), phi))
    }

    /// Diagonal network applying `e^{i phases[k]}` to mode `k`.
    pub fn phase_shifts(phases: &[f64]) -> Self {
        let n = phases.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (k, &ph) in phases.iter().enumerate() {
            m[(k, k)] = Complex64::from_polar(1.0, ph);
        }
        Self {
            matrix: m,
            provenance: Provenance::PhaseShifts {
                phases: phases.to_vec(),
            },
        }
    }

    /// Reflectivity `|L[0][0]|^2` of a two-mode element.
    pub fn reflectivity(&self) -> f64 {
        self.matrix[(0, 0)].norm_sqr()
    }

    /// Place a two-mode element on modes `(i, j)` of an `n_modes` network;
    /// `bs[0][*]` acts as mode `i`, `bs[1][*]` as mode `j`.
    pub fn embed_two_mode(bs: &Interferometer, (i, j): (usize, usize), n_modes: usize) -> Result<Self> {
        if bs.n_modes() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a two-mode element, got {} modes",
                bs.n_modes()
            )));
        }
        if i == j || i >= n_modes || j >= n_modes {
            return Err(Error::BadModeIndex { i, j, n_modes });
        }
        let mut m = ComplexMatrix::identity(n_modes);
        m[(i, i)] = bs.matrix[(0, 0)];
        m[(i, j)] = bs.matrix[(0, 1)];
        m[(j, i)] = bs.matrix[(1, 0)];
        m[(j, j)] = bs.matrix[(1, 1)];
        Ok(Self {
            matrix: m,
            provenance: Provenance::Embedded {
                modes: [i + 1, j + 1],
                inner: Box::new(bs.provenance.clone()),
            },
        })
    }

    /// The network `self` followed by `next`.
    pub fn then(&self, next: &Interferometer) -> Result<Self> {
        if self.n_modes() != next.n_modes() {
            return Err(Error::DimensionMismatch(format!(
                "cannot chain {}-mode and {}-mode networks",
                self.n_modes(),
                next.n_modes()
            )));
        }
        let mut parts = match &self.provenance {
            Provenance::Sequence { parts } => parts.clone(),
            p => vec![p.clone()],
        };
        match &next.provenance {
            Provenance::Sequence { parts: more } => parts.extend(more.iter().cloned()),
            p => parts.push(p.clone()),
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            provenance: Provenance::Sequence { parts },
        })
    }

    /// Elements applied in order.
    pub fn sequence<'a, I>(n_modes: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Interferometer>,
    {
        elements
            .into_iter()
            .try_fold(Self::identity(n_modes), |acc, e| acc.then(e))
    }

    /// Unitary whose leading rows are exactly `partial_rows`; the remaining
    /// rows come from Gram-Schmidt on the canonical basis in index order.
    pub fn complete_rows(partial_rows: &[Vec<Complex64>], n_modes: usize) -> Result<Self> {
        if partial_rows.len() > n_modes || partial_rows.iter().any(|r| r.len() != n_modes) {
            return Err(Error::DimensionMismatch(format!(
                "{} rows of lengths {:?} cannot seed a {n_modes}-mode unitary",
                partial_rows.len(),
                partial_rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let mut deviation: f64 = 0.0;
        for (a, ra) in partial_rows.iter().enumerate() {
            for (b, rb) in partial_rows.iter().enumerate().skip(a) {
                let ip = inner(ra, rb);
                let target = if a == b { 1.0 } else { 0.0 };
                deviation = deviation.max((ip - target).norm());
            }
        }
        if deviation > UNITARITY_TOL {
            return Err(Error::RowsNotOrthonormal { deviation });
        }

        let mut basis: Vec<Vec<Complex64>> = partial_rows.to_vec();
        'passes: for &threshold in &COMPLETION_RESIDUAL {
            for k in 0..n_modes {
                if basis.len() == n_modes {
                    break 'passes;
                }
                let mut v = vec![Complex64::new(0.0, 0.0); n_modes];
                v[k] = Complex64::new(1.0, 0.0);
                // two projection passes keep the result orthogonal to rounding
                for _ in 0..2 {
                    for q in &basis {
                        let ip = inner(q, &v);
                        v.iter_mut().zip(q).for_each(|(x, y)| *x -= ip * y);
                    }
                }
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > threshold {
                    v.iter_mut().for_each(|z| *z /= norm);
                    basis.push(v);
                }
            }
        }
        let matrix = ComplexMatrix::from_rows(&basis)?;
        Self::new(
            matrix,
            Provenance::Completion {
                given_rows: partial_rows.len(),
            },
        )
    }

    /// Haar-random unitary from a seeded generator.
    pub fn haar_random(n_modes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::haar_random_with(n_modes, &mut rng).with_provenance(Provenance::Haar { seed })
    }

    /// Haar-random unitary drawn from `rng`.
    ///
    /// Columns of a complex Gaussian matrix are orthonormalized in order; the
    /// triangular factor of this QR decomposition has a positive diagonal,
    /// which is the phase convention that makes `Q` Haar distributed.
    pub fn haar_random_with<R: Rng + ?Sized>(n_modes: usize, rng: &mut R) -> Self {
        let n = n_modes.max(1);
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re * scale, im * scale)
                    })
                    .collect()
            })
            .collect();
        for j in 0..n {
            for _ in 0..2 {
                for q in 0..j {
                    let ip = inner(&cols[q], &cols[j]);
                    let (done, rest) = cols.split_at_mut(j);
                    rest[0].iter_mut().zip(&done[q]).for_each(|(x, y)| *x -= ip * y);
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols[j].iter_mut().for_each(|z| *z /= norm);
        }
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Self {
            matrix: m,
            provenance: Provenance::HaarStream,
        }
    }
}

/// `<a, b> = sum_k conj(a_k) b_k`
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonComplex {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterferometerJson {
    n_modes: usize,
    matrix: Vec<Vec<JsonComplex>>,
    provenance: Provenance,
}

impl Serialize for Interferometer {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let matrix = (0..self.n_modes())
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .map(|z| JsonComplex { re: z.re, im: z.im })
                    .collect()
            })
            .collect();
        InterferometerJson {
            n_modes: self.n_modes(),
            matrix,
            provenance: self.provenance.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interferometer {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = InterferometerJson::deserialize(deserializer)?;
        let rows: Vec<Vec<Complex64>> = raw
            .matrix
            .iter()
            .map(|r| r.iter().map(|z| Complex64::new(z.re, z.im)).collect())
            .collect();
        if rows.len() != raw.n_modes {
            return Err(D::Error::custom(format!(
                "n_modes is {} but the matrix has {} rows",
                raw.n_modes,
                rows.len()
            )));
        }
        let matrix = ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)?;
        Interferometer::new(matrix, raw.provenance).map_err(D::Error::custom)
    }
}
