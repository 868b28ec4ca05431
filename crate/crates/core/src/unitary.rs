//! Interferometer unitaries: Haar-random generation and triangular
//! beamsplitter decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng;

/// Largest `|U^dag U - I|` entry accepted as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Two-mode element acting on modes `(mode, mode + 1)` as
///
/// ```text
/// [ e^{i phi} cos theta   -sin theta ]
/// [ e^{i phi} sin theta    cos theta ]
/// ```
///
/// i.e. a phase shifter on the first mode followed by a beamsplitter of
/// reflectivity `cos^2 theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub mode: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Rotation {
    /// The 2x2 block in row-major order.
    pub fn block(&self) -> [Complex64; 4] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [e * c, Complex64::new(-s, 0.0), e * s, Complex64::new(c, 0.0)]
    }

    /// Replaces `M` with `M T` in place.
    fn right_multiply(&self, m: &mut DMatrix<Complex64>) {
        let [t00, t01, t10, t11] = self.block();
        let (p, q) = (self.mode, self.mode + 1);
        for row in 0..m.nrows() {
            let a = m[(row, p)];
            let b = m[(row, q)];
            m[(row, p)] = a * t00 + b * t10;
            m[(row, q)] = a * t01 + b * t11;
        }
    }

    /// Replaces `M` with `M T^dag` in place.
    fn right_multiply_adjoint(&self, m: &mut DMatrix<Complex64>) {
        let [t00, t01, t10, t11] = self.block();
        let (p, q) = (self.mode, self.mode + 1);
        for row in 0..m.nrows() {
            let a = m[(row, p)];
            let b = m[(row, q)];
            m[(row, p)] = a * t00.conj() + b * t01.conj();
            m[(row, q)] = a * t10.conj() + b * t11.conj();
        }
    }
}

/// `U = D T_K ... T_2 T_1`, with `T_k = rotations[k - 1]` and `D` the
/// diagonal of output phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub modes: usize,
    pub rotations: Vec<Rotation>,
    pub phases: Vec<f64>,
}

impl Decomposition {
    pub fn recompose(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.modes,
            self.phases.iter().map(|&a| Complex64::from_polar(1.0, a)),
        ));
        for rot in self.rotations.iter().rev() {
            rot.right_multiply(&mut m);
        }
        m
    }

    /// Optical elements used: beamsplitters plus output phase shifters.
    pub fn element_count(&self) -> usize {
        self.rotations.len() + self.phases.len()
    }
}

/// An `m`-mode linear-optical network: `a_i^dag -> sum_j U_ij a_j^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferometer {
    matrix: DMatrix<Complex64>,
    decomposition: Decomposition,
}

impl Interferometer {
    /// Wraps a unitary matrix and decomposes it.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let decomposition = reck_decompose(&matrix)?;
        Ok(Self { matrix, decomposition })
    }

    pub fn identity(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(domain("interferometer needs at least one mode"));
        }
        Self::new(DMatrix::identity(modes, modes))
    }

    /// `[[1, 1], [1, -1]] / sqrt(2)`.
    pub fn balanced_beamsplitter() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(DMatrix::from_row_slice(2, 2, &[h, h, h, -h])).expect("Hadamard is unitary")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }
}

/// Largest entry of `|U^dag U - I|`, or infinity for non-square input.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    g.iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % u.nrows(), k / u.nrows());
            let target = if i == j { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Haar-random `m x m` unitary drawn from stream [`rng::UNITARY_STREAM`] of
/// `seed`.
pub fn haar_unitary(modes: usize, seed: u64) -> Result<Interferometer> {
    let mut rng = rng::stream(seed, rng::UNITARY_STREAM);
    haar_unitary_with(modes, &mut rng)
}

/// QR-orthonormalises a complex Gaussian matrix and multiplies each column
/// of `Q` by the phase of the matching diagonal entry of `R`, which makes
/// the result Haar distributed.
pub fn haar_unitary_with<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> Result<Interferometer> {
    if modes == 0 {
        return Err(domain("interferometer needs at least one mode"));
    }
    let entries: Vec<Complex64> = (0..modes * modes)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let z = DMatrix::from_row_slice(modes, modes, &entries);
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..modes {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..modes {
            q[(i, j)] *= phase;
        }
    }
    Interferometer::new(q)
}

/// Factorises a unitary into at most `m(m-1)/2` nearest-neighbour rotations
/// and `m` output phases.
///
/// Rows are cleared from the bottom up. Row `i` has its entries `0..i`
/// zeroed left to right, each by a rotation on columns `(j, j+1)` that moves
/// the weight of column `j` into column `j+1`. Rotations only touch columns
/// whose entries in the already-cleared rows are zero, so finished rows stay
/// finished and what remains is diagonal. Entries that are already zero get
/// no rotation.
pub fn reck_decompose(u: &DMatrix<Complex64>) -> Result<Decomposition> {
    let deviation = unitarity_deviation(u);
    if deviation.is_nan() || deviation >= UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary { deviation });
    }
    let m = u.nrows();
    let mut w = u.clone();
    let mut rotations = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in (1..m).rev() {
        for j in 0..i {
            let a = w[(i, j)];
            if a.norm() == 0.0 {
                continue;
            }
            let b = w[(i, j + 1)];
            let theta = a.norm().atan2(b.norm());
            let phi = if b.norm() > 0.0 { a.arg() - b.arg() } else { 0.0 };
            let rot = Rotation { mode: j, theta, phi };
            rot.right_multiply_adjoint(&mut w);
            w[(i, j)] = Complex64::new(0.0, 0.0);
            rotations.push(rot);
        }
    }
    let phases = (0..m).map(|k| w[(k, k)].arg()).collect();
    Ok(Decomposition { modes: m, rotations, phases })
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
