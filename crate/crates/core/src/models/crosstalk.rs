use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Model, OffsetSet, SingleQubitModel};
use crate::operators::{Basis, CMatrix, Operator};

/// Three-level target qubit with an always-on ZZ coupling to a two-level
/// spectator that is frozen in a computational state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkModel {
    pub base: SingleQubitModel,
    pub zeta_zz: f64,
    /// Spectator state, 0 or 1.
    pub spectator: u8,
}

impl CrosstalkModel {
    pub fn new(base: SingleQubitModel, zeta_zz: f64, spectator: u8) -> Self {
        CrosstalkModel { base, zeta_zz, spectator: spectator.min(1) }
    }

    /// Diagonal of `(zeta/2) Z3 (x) sigma_z` with `Z3 = diag(1, -1, 0)`, in
    /// the order `00, 01, 10, 11, 20, 21`.
    pub fn zz_diagonal(&self) -> [f64; 6] {
        let z3 = [1.0, -1.0, 0.0];
        let sz = [1.0, -1.0];
        let mut d = [0.0; 6];
        for (i, a) in z3.iter().enumerate() {
            for (j, b) in sz.iter().enumerate() {
                d[2 * i + j] = 0.5 * self.zeta_zz * a * b;
            }
        }
        d
    }
}

/// `h_single (x) I2 + (zeta/2) Z3 (x) sigma_z`.
pub fn h_crosstalk(m: &CrosstalkModel, off: &OffsetSet, t: f64, include_leak: bool) -> Operator {
    m.operator(off, t, include_leak)
}

impl Model for CrosstalkModel {
    fn basis(&self) -> Basis {
        Basis::levels(3).tensor(&Basis::levels(2))
    }

    fn duration(&self) -> f64 {
        self.base.duration()
    }

    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix {
        let h1 = self.base.matrix(off, t, include_leak);
        let mut h = h1.kronecker(&CMatrix::identity(2, 2));
        for (k, v) in self.zz_diagonal().iter().enumerate() {
            h[(k, k)] += Complex64::from(*v);
        }
        h
    }

    /// Target computational states with the spectator in its initial state.
    fn computational_labels(&self) -> Vec<String> {
        vec![format!("0{}", self.spectator), format!("1{}", self.spectator)]
    }

    fn frequency_scale(&self) -> f64 {
        self.base.frequency_scale() + self.zeta_zz.abs()
    }

    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let id = CMatrix::identity(2, 2);
        let (d, p) = self.base.collapse_operators();
        (d.iter().map(|m| m.kronecker(&id)).collect(), p.iter().map(|m| m.kronecker(&id)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mhz;
    use crate::models::{Convention, TransmonParams};

    fn base() -> SingleQubitModel {
        SingleQubitModel::not_gate(TransmonParams::default(), Convention::Transmon)
    }

    #[test]
    fn zero_zeta_is_plain_tensor() {
        let m = CrosstalkModel::new(base(), 0.0, 0);
        let t = 5e-9;
        let expected = base().matrix(&OffsetSet::ZERO, t, true).kronecker(&CMatrix::identity(2, 2));
        assert_eq!(m.matrix(&OffsetSet::ZERO, t, true), expected);
    }

    #[test]
    fn spectator_flip_negates_crosstalk() {
        let m = CrosstalkModel::new(base(), mhz(1.0), 0);
        let d = m.zz_diagonal();
        for i in 0..3 {
            assert_eq!(d[2 * i], -d[2 * i + 1]);
        }
        // |1> (x) |0> sits at index 2.
        assert_eq!(d[2], -0.5 * mhz(1.0));
    }
}
