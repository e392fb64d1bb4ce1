//! The Hilbert space of the stationary sequence.
//!
//! For an atomic measure the sequence is realized exactly: `φ_n` is the
//! vector `(e^{2πinx_k})_k` in `L²(μ)` with the weighted inner product. For
//! other moment sources only the Gram (Toeplitz) realization is available.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, column_matrix, from_standard, span_basis, to_standard};
use crate::spectral::{AtomicMeasure, MomentSource};

/// Element of `L²(μ)` for an atomic `μ`: one value per atom.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralVector {
    values: Vec<Complex64>,
}

impl SpectralVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The constant function `𝟙`.
    pub fn ones(dim: usize) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                got: self.dim(),
            })
        }
    }

    /// `self += a · v`
    pub fn axpy(&mut self, a: Complex64, v: &SpectralVector) {
        for (x, &y) in self.values.iter_mut().zip(&v.values) {
            *x += a * y;
        }
    }

    pub fn sub(&self, other: &SpectralVector) -> SpectralVector {
        SpectralVector::new(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &SpectralVector) -> SpectralVector {
        SpectralVector::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, a: Complex64) -> SpectralVector {
        SpectralVector::new(self.values.iter().map(|&v| a * v).collect())
    }
}

impl AtomicMeasure {
    /// `⟨u, v⟩ = Σ_k w_k u_k conj(v_k)`, without dimension checks.
    pub(crate) fn inner_unchecked(&self, u: &SpectralVector, v: &SpectralVector) -> Complex64 {
        self.weights()
            .zip(u.values().iter().zip(v.values()))
            .map(|(w, (a, b))| w * a * b.conj())
            .sum()
    }

    pub(crate) fn norm_unchecked(&self, u: &SpectralVector) -> f64 {
        self.weights()
            .zip(u.values())
            .map(|(w, a)| w * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self, u: &SpectralVector) -> Result<f64> {
        u.check_dim(self.dim())?;
        Ok(self.norm_unchecked(u))
    }

    pub fn distance(&self, u: &SpectralVector, v: &SpectralVector) -> Result<f64> {
        u.check_dim(self.dim())?;
        v.check_dim(self.dim())?;
        Ok(self.norm_unchecked(&u.sub(v)))
    }
}

/// `φ_n = (e^{2πinx_k})_k`.
pub fn phi_vector(m: &AtomicMeasure, n: usize) -> SpectralVector {
    SpectralVector::new(
        m.positions()
            .map(|x| Complex64::from_polar(1.0, TAU * (n as f64 * x).rem_euclid(1.0)))
            .collect(),
    )
}

/// Weighted inner product, linear in the first argument.
pub fn inner(m: &AtomicMeasure, u: &SpectralVector, v: &SpectralVector) -> Result<Complex64> {
    u.check_dim(m.dim())?;
    v.check_dim(m.dim())?;
    Ok(m.inner_unchecked(u, v))
}

/// Gram matrix `G[i][j] = ⟨φ_j, φ_i⟩ = μ̂(i - j)` of `φ_0..φ_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramFrame {
    entries: DMatrix<Complex64>,
    min_eigenvalue: f64,
}

/// Smallest eigenvalue below which the Gram matrix is reported singular.
pub const GRAM_SINGULAR_TOL: f64 = 1e-10;

impl GramFrame {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Repeated or dependent `φ_n` make `G` singular; this is reported, never
    /// regularized.
    pub fn is_singular(&self) -> bool {
        self.min_eigenvalue < GRAM_SINGULAR_TOL
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.entries[(i, j)]).collect())
            .collect()
    }
}

impl Serialize for GramFrame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

pub fn gram_frame(src: &MomentSource, n: usize) -> Result<GramFrame> {
    if n == 0 {
        return Err(Error::Range {
            what: "Gram size",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let moments: Vec<Complex64> = (0..n).map(|k| src.fourier_moment(k)).collect::<Result<_>>()?;
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            moments[i - j]
        } else {
            let m = moments[j - i];
            Complex64::new(m.re, 0.0 - m.im)
        }
    });
    let min_eigenvalue = linalg::hermitian_eigenvalues(&entries)[0];
    Ok(GramFrame {
        entries,
        min_eigenvalue,
    })
}

/// `⟨Σ_j cu_j φ_j, Σ_i cv_i φ_i⟩ = cv* G cu`.
pub fn gram_inner(g: &GramFrame, cu: &[Complex64], cv: &[Complex64]) -> Result<Complex64> {
    for c in [cu, cv] {
        if c.len() > g.size() {
            return Err(Error::Dimension {
                expected: g.size(),
                got: c.len(),
            });
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, b) in cv.iter().enumerate() {
        for (j, a) in cu.iter().enumerate() {
            acc += b.conj() * g.entries[(i, j)] * a;
        }
    }
    Ok(acc)
}

/// Orthogonal projection of `x` onto `span(basis)` in `L²(μ)`.
pub fn project_span(m: &AtomicMeasure, basis: &[SpectralVector], x: &SpectralVector) -> Result<SpectralVector> {
    if basis.is_empty() {
        return Err(Error::Range {
            what: "basis size",
            value: 0.0,
            expected: ">= 1",
        });
    }
    for v in basis.iter().chain(std::iter::once(x)) {
        v.check_dim(m.dim())?;
    }
    let (q, _) = span_basis(&column_matrix(m, basis));
    let xs = to_standard(m, x);
    let projected = &q * (q.adjoint() * xs);
    Ok(from_standard(m, &projected))
}

/// Frame bounds of a finite family restricted to its span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub rank: usize,
}

/// Extreme nonzero eigenvalues of the frame operator `Σ ⟨·, v⟩ v`.
///
/// These are the squared singular values of the synthesis matrix, which is
/// how they are computed.
pub fn frame_bounds(m: &AtomicMeasure, vectors: &[SpectralVector]) -> Result<FrameBounds> {
    if vectors.is_empty() {
        return Err(Error::Range {
            what: "vector count",
            value: 0.0,
            expected: ">= 1",
        });
    }
    for v in vectors {
        v.check_dim(m.dim())?;
    }
    let (_, sigma) = span_basis(&column_matrix(m, vectors));
    Ok(match (sigma.first(), sigma.last()) {
        (Some(&hi), Some(&lo)) => FrameBounds {
            lower: lo * lo,
            upper: hi * hi,
            rank: sigma.len(),
        },
        _ => FrameBounds {
            lower: 0.0,
            upper: 0.0,
            rank: 0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_atom() -> AtomicMeasure {
        AtomicMeasure::new(&[(0.0, 0.5), (0.5, 0.5)]).unwrap()
    }

    fn close(a: &SpectralVector, b: &SpectralVector, tol: f64) -> bool {
        a.values().iter().zip(b.values()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn phi_vector_examples() {
        assert_eq!(
            phi_vector(&AtomicMeasure::dirac(), 5),
            SpectralVector::from_real(&[1.0])
        );
        let m = two_atom();
        assert!(close(
            &phi_vector(&m, 1),
            &SpectralVector::from_real(&[1.0, -1.0]),
            1e-15
        ));
        assert!(close(
            &phi_vector(&m, 2),
            &SpectralVector::from_real(&[1.0, 1.0]),
            1e-15
        ));
    }

    #[test]
    fn inner_examples() {
        let m = two_atom();
        for n in 0..5 {
            let p = phi_vector(&m, n);
            assert!((inner(&m, &p, &p).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        }
        assert!(inner(&m, &phi_vector(&m, 0), &phi_vector(&m, 1)).unwrap().norm() < 1e-15);
        let d = AtomicMeasure::dirac();
        let a = SpectralVector::new(vec![c(1.0, 2.0)]);
        let b = SpectralVector::new(vec![c(3.0, -1.0)]);
        assert!((inner(&d, &a, &b).unwrap() - c(1.0, 2.0) * c(3.0, 1.0)).norm() < 1e-14);
        assert!(matches!(inner(&m, &a, &b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn gram_frame_examples() {
        let g = gram_frame(&MomentSource::Atomic(AtomicMeasure::dirac()), 3).unwrap();
        assert!(g.rows().iter().flatten().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
        assert!(g.is_singular());

        let g = gram_frame(&MomentSource::Lebesgue, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(i, j), c(if i == j { 1.0 } else { 0.0 }, 0.0));
            }
        }
        assert!((g.min_eigenvalue() - 1.0).abs() < 1e-12);

        let g = gram_frame(&MomentSource::Atomic(two_atom()), 3).unwrap();
        let row0: Vec<f64> = g.rows()[0].iter().map(|v| v.re).collect();
        assert!((row0[0] - 1.0).abs() < 1e-15 && row0[1].abs() < 1e-15 && (row0[2] - 1.0).abs() < 1e-15);
        assert!(g.hermitian_defect() < 1e-12);
        assert!(gram_frame(&MomentSource::Lebesgue, 0).is_err());
    }

    #[test]
    fn gram_inner_examples() {
        let id = gram_frame(&MomentSource::Lebesgue, 3).unwrap();
        let u = [c(1.0, 1.0), c(2.0, 0.0)];
        let v = [c(0.5, 0.0), c(0.0, 1.0)];
        let expected = u[0] * v[0].conj() + u[1] * v[1].conj();
        assert!((gram_inner(&id, &u, &v).unwrap() - expected).norm() < 1e-15);

        let ones = gram_frame(&MomentSource::Atomic(AtomicMeasure::dirac()), 2).unwrap();
        let w = [c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(gram_inner(&ones, &w, &w).unwrap().norm() < 1e-15);

        let two = gram_frame(&MomentSource::Atomic(two_atom()), 3).unwrap();
        let w = [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        assert!(gram_inner(&two, &w, &w).unwrap().norm() < 1e-15);

        assert!(gram_inner(&two, &[c(0.0, 0.0); 4], &w).is_err());
    }

    #[test]
    fn project_span_examples() {
        let m = AtomicMeasure::new(&[(0.0, 0.5), (1.0 / 3.0, 0.25), (2.0 / 3.0, 0.25)]).unwrap();
        let full: Vec<_> = (0..3).map(|n| phi_vector(&m, n)).collect();
        let x = SpectralVector::new(vec![c(0.3, 1.0), c(-2.0, 0.5), c(0.0, -1.0)]);
        assert!(close(&project_span(&m, &full, &x).unwrap(), &x, 1e-10));

        let two = two_atom();
        let p = project_span(&two, &[phi_vector(&two, 0)], &SpectralVector::from_real(&[1.0, -1.0])).unwrap();
        assert!(close(&p, &SpectralVector::zeros(2), 1e-14));

        let u = SpectralVector::new(vec![c(0.2, 0.1), c(-1.0, 0.4), c(0.7, 0.0)]);
        assert!(close(
            &project_span(&m, std::slice::from_ref(&u), &u).unwrap(),
            &u,
            1e-12
        ));
        assert!(project_span(&m, &[], &u).is_err());
    }

    #[test]
    fn frame_bounds_examples() {
        let roots = AtomicMeasure::roots_of_unity(4).unwrap();
        let ortho: Vec<_> = (0..4).map(|n| phi_vector(&roots, n)).collect();
        let fb = frame_bounds(&roots, &ortho).unwrap();
        assert!((fb.lower - 1.0).abs() < 1e-12 && (fb.upper - 1.0).abs() < 1e-12 && fb.rank == 4);

        let two = two_atom();
        let fb = frame_bounds(&two, &[phi_vector(&two, 0), phi_vector(&two, 1)]).unwrap();
        assert!((fb.lower - 1.0).abs() < 1e-12 && (fb.upper - 1.0).abs() < 1e-12);

        let fb = frame_bounds(&two, &[phi_vector(&two, 0), phi_vector(&two, 0)]).unwrap();
        assert!((fb.lower - 2.0).abs() < 1e-12 && (fb.upper - 2.0).abs() < 1e-12 && fb.rank == 1);
    }

    #[test]
    fn gram_serializes_row_major() {
        let g = gram_frame(&MomentSource::Lebesgue, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&g).unwrap(),
            "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]"
        );
    }
}
