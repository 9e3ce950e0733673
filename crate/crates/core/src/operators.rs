//! Dense complex operators, states and density matrices over labelled bases.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ordered list of level labels. Cloning is cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis(Arc<[String]>);

impl Basis {
    /// Levels labelled "0", "1", ..., "n-1".
    pub fn levels(n: usize) -> Self {
        Basis((0..n).map(|k| k.to_string()).collect())
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        Basis(labels.iter().map(|s| s.as_ref().to_owned()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0.iter().position(|l| l == label).ok_or_else(|| Error::Label(label.to_owned()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    /// Kronecker-ordered product basis, the left factor varying slowest.
    pub fn tensor(&self, other: &Basis) -> Basis {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in self.0.iter() {
            for b in other.0.iter() {
                out.push(format!("{a}{b}"));
            }
        }
        Basis(out.into())
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Square complex matrix tied to a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    basis: Basis,
    entries: CMatrix,
}

impl Operator {
    pub fn new(basis: Basis, entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dim(format!("operator must be square, got {}x{}", entries.nrows(), entries.ncols())));
        }
        if entries.nrows() != basis.len() {
            return Err(Error::Dim(format!("{} labels for a {}-dimensional operator", basis.len(), entries.nrows())));
        }
        Ok(Operator { basis, entries })
    }

    /// Operator on the default level basis "0".."n-1".
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        Self::new(Basis::levels(n), entries)
    }

    pub fn identity(basis: Basis) -> Self {
        let n = basis.len();
        Operator { basis, entries: CMatrix::identity(n, n) }
    }

    pub fn zeros(basis: Basis) -> Self {
        let n = basis.len();
        Operator { basis, entries: CMatrix::zeros(n, n) }
    }

    /// `|a><b|` on the given basis.
    pub fn outer(basis: Basis, a: &str, b: &str) -> Result<Self> {
        let (i, j) = (basis.index_of(a)?, basis.index_of(b)?);
        let mut op = Self::zeros(basis);
        op.entries[(i, j)] = ONE;
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, row: &str, col: &str) -> Result<Complex64> {
        Ok(self.entries[(self.basis.index_of(row)?, self.basis.index_of(col)?)])
    }

    pub fn is_hermitian(&self) -> bool {
        is_hermitian(&self.entries)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Operator {
        Operator { basis: self.basis.clone(), entries: self.entries.adjoint() }
    }

    pub fn scale(&self, s: Complex64) -> Operator {
        Operator { basis: self.basis.clone(), entries: &self.entries * s }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Operator { basis: self.basis.clone(), entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Operator { basis: self.basis.clone(), entries: &self.entries - &other.entries })
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        Ok(Operator { basis: self.basis.clone(), entries: &self.entries * &other.entries })
    }

    fn check_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dim(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

/// Relative Hermiticity test: `max|A - A^H| < 1e-12 max|A|`.
pub fn is_hermitian(m: &CMatrix) -> bool {
    hermiticity_defect(m) <= 1e-12
}

/// `max|A - A^H| / max|A|`, zero for the zero matrix.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    Operator { basis: a.basis.tensor(&b.basis), entries: a.entries.kronecker(&b.entries) }
}

pub fn dagger(a: &Operator) -> Operator {
    a.dagger()
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

pub fn trace(a: &Operator) -> Complex64 {
    a.entries.trace()
}

pub fn fro_norm(a: &Operator) -> f64 {
    a.entries.norm()
}

/// `exp(s h)`. Hermitian inputs go through an eigendecomposition, anything
/// else through scaling and squaring with a Padé approximant.
pub fn matexp(h: &Operator, s: Complex64) -> Result<Operator> {
    if !h.is_finite() || !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidOperator("non-finite entries in matexp".into()));
    }
    let entries = if h.is_hermitian() { expm_hermitian(h.entries(), s) } else { (h.entries() * s).exp() };
    Ok(Operator { basis: h.basis.clone(), entries })
}

/// `exp(s h)` for Hermitian `h`.
pub fn expm_hermitian(h: &CMatrix, s: Complex64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let f = (s * *lambda).exp();
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= f;
        }
    }
    scaled * v.adjoint()
}

/// `exp(-i h dt)` for Hermitian `h`.
pub fn unitary_step(h: &CMatrix, dt: f64) -> CMatrix {
    expm_hermitian(h, Complex64::new(0.0, -dt))
}

/// Diagonal 0/1 operator selecting `labels`.
pub fn projector<S: AsRef<str>>(labels: &[S], basis: &Basis) -> Result<Operator> {
    let mut op = Operator::zeros(basis.clone());
    for l in labels {
        let k = basis.index_of(l.as_ref())?;
        op.entries[(k, k)] = ONE;
    }
    Ok(op)
}

/// Unitarity defect `||U^H U - I||_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// Normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    basis: Basis,
    amplitudes: CVector,
}

impl StateVector {
    /// Normalises the amplitudes; a zero vector is rejected.
    pub fn new(basis: Basis, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::Dim(format!("{} amplitudes for {} labels", amplitudes.len(), basis.len())));
        }
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidOperator("state has zero or non-finite norm".into()));
        }
        Ok(StateVector { basis, amplitudes: amplitudes / Complex64::from(norm) })
    }

    pub fn basis_state(basis: Basis, label: &str) -> Result<Self> {
        let k = basis.index_of(label)?;
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[k] = ONE;
        Ok(StateVector { basis, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { basis: self.basis.clone(), entries: &self.amplitudes * self.amplitudes.adjoint() }
    }

    /// Applies a unitary; the result is renormalised against round-off.
    pub fn evolve(&self, u: &CMatrix) -> Result<StateVector> {
        StateVector::new(self.basis.clone(), u * &self.amplitudes)
    }
}

/// Density matrix. Construction validates Hermiticity, trace and positivity.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(basis: Basis, entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() != basis.len() {
            return Err(Error::Dim("density matrix shape does not match basis".into()));
        }
        let n = entries.nrows();
        let mut herm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm = herm.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        if herm > 1e-10 {
            return Err(Error::InvalidOperator(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = entries.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(Error::InvalidOperator(format!("density matrix trace {tr}")));
        }
        let rho = DensityMatrix { basis, entries };
        let min_eig = rho.min_eigenvalue();
        if min_eig < -1e-8 {
            return Err(Error::InvalidOperator(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    /// Wraps the entries without validation, for integrator output that is
    /// checked through diagnostics instead.
    pub fn from_raw(basis: Basis, entries: CMatrix) -> Self {
        DensityMatrix { basis, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::from(0.5);
        SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        let n = basis.len();
        DensityMatrix { basis, entries: CMatrix::identity(n, n) / Complex64::from(n as f64) }
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(psi: &StateVector) -> Self {
        psi.to_density()
    }
}

/// Diagonal populations of a state in its own basis order.
pub trait Populations {
    fn basis(&self) -> &Basis;
    fn diagonal(&self) -> Vec<f64>;
}

impl Populations for StateVector {
    fn basis(&self) -> &Basis {
        &self.basis
    }
    fn diagonal(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl Populations for DensityMatrix {
    fn basis(&self) -> &Basis {
        &self.basis
    }
    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).collect()
    }
}

/// Pauli matrices on a two-level basis, handy in tests and examples.
pub fn pauli(which: char) -> Operator {
    let m = match which {
        'x' => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'y' => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        'z' => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => CMatrix::identity(2, 2),
    };
    Operator { basis: Basis::levels(2), entries: m }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let a = Operator::identity(Basis::levels(2));
        let b = Operator::identity(Basis::levels(3));
        let p = tensor_product(&a, &b);
        assert_eq!(p.entries(), &CMatrix::identity(6, 6));
        assert_eq!(p.basis().labels()[4], "11");
    }

    #[test]
    fn ket_bra_tensor_has_two_unit_entries() {
        let k = Operator::outer(Basis::levels(2), "0", "1").unwrap();
        let p = tensor_product(&k, &Operator::identity(Basis::levels(2)));
        let nz: Vec<_> = p.entries().iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nz.len(), 2);
        assert!(nz.iter().all(|z| **z == ONE));
    }

    #[test]
    fn zz_sign_pattern() {
        let z = pauli('z');
        let zz = tensor_product(&z, &z);
        let d: Vec<f64> = (0..4).map(|k| zz.entries()[(k, k)].re).collect();
        assert_eq!(d, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn matexp_of_zero_is_identity() {
        let z = Operator::zeros(Basis::levels(3));
        let e = matexp(&z, c(0.3, -2.0)).unwrap();
        assert_eq!(e.entries(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn matexp_pauli_rotation() {
        let x = pauli('x');
        let e = matexp(&x, c(0.0, -std::f64::consts::FRAC_PI_2)).unwrap();
        let expected = x.scale(-I);
        assert!((e.entries() - expected.entries()).norm() < 1e-14);
    }

    #[test]
    fn matexp_general_path_matches_hermitian_path() {
        // A skew-Hermitian input exercises the Padé branch.
        let h = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.4), c(0.1, -0.4), c(-0.7, 0.0)]);
        let anti = Operator::from_matrix(&h * I).unwrap();
        assert!(!anti.is_hermitian());
        let via_pade = matexp(&anti, c(-1.0, 0.0)).unwrap();
        let via_eig = expm_hermitian(&h, c(0.0, -1.0));
        assert!((via_pade.entries() - via_eig).norm() < 1e-12);
    }

    #[test]
    fn matexp_rejects_nan() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        let op = Operator::from_matrix(m).unwrap();
        assert!(matches!(matexp(&op, ONE), Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn projector_examples() {
        let p = projector(&["0", "1"], &Basis::levels(3)).unwrap();
        assert_eq!(p.entries(), &CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ONE, ZERO])));
        let all = projector(&["0", "1", "2"], &Basis::levels(3)).unwrap();
        assert_eq!(all.entries(), &CMatrix::identity(3, 3));
        let two = Basis::from_labels(&["00", "01", "10", "02", "11", "20"]);
        let pk = projector(&["00", "01", "10", "11"], &two).unwrap();
        assert_eq!(pk.matmul(&pk).unwrap(), pk);
        assert!(matches!(projector(&["7"], &Basis::levels(3)), Err(Error::Label(_))));
    }

    #[test]
    fn standard_ops() {
        assert_eq!(trace(&Operator::identity(Basis::levels(3))), c(3.0, 0.0));
        let comm = commutator(&pauli('x'), &pauli('y')).unwrap();
        let expected = pauli('z').scale(c(0.0, 2.0));
        assert!((comm.entries() - expected.entries()).norm() < 1e-15);
        let a = Operator::from_matrix(CMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64 - 1.0))).unwrap();
        assert_eq!(fro_norm(&a.dagger().dagger().sub(&a).unwrap()), 0.0);
        assert!(matches!(commutator(&pauli('x'), &Operator::identity(Basis::levels(3))), Err(Error::Dim(_))));
    }

    #[test]
    fn density_validation() {
        let b = Basis::levels(2);
        assert!(DensityMatrix::new(b.clone(), CMatrix::identity(2, 2)).is_err());
        let rho = DensityMatrix::maximally_mixed(b.clone());
        assert!(DensityMatrix::new(b.clone(), rho.entries().clone()).is_ok());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(b, bad).is_err());
    }

    #[test]
    fn state_is_normalised() {
        let psi = StateVector::new(Basis::levels(3), CVector::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0), ZERO])).unwrap();
        assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(Basis::levels(2), CVector::zeros(2)).is_err());
    }
}
