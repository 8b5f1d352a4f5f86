use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ket(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// |v⟩⟨v|.
pub fn projector(v: &[Complex64]) -> CMatrix {
    let k = ket(v);
    &k * k.adjoint()
}

/// Kronecker product, left to right. The empty product is the 1×1 identity.
pub fn tensor(ms: &[CMatrix]) -> CMatrix {
    ms.iter()
        .fold(CMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_shapes_and_values() {
        let i2 = CMatrix::identity(2, 2);
        let i3 = CMatrix::identity(3, 3);
        assert_eq!(tensor(&[i2.clone(), i2.clone()]), CMatrix::identity(4, 4));
        assert_eq!(tensor(&[i2.clone(), i3]).shape(), (6, 6));
        let p0 = projector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let p1 = projector(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let p01 = tensor(&[p0, p1]);
        let mut want = CMatrix::zeros(4, 4);
        want[(1, 1)] = c(1.0, 0.0);
        assert_eq!(p01, want);
    }

    #[test]
    fn eigen_helpers() {
        let mut m = CMatrix::identity(2, 2);
        m[(1, 1)] = c(-0.5, 0.0);
        assert!(hermitian(&m, 1e-12));
        assert!((min_eigenvalue(&m) + 0.5).abs() < 1e-12);
    }
}
