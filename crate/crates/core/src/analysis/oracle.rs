//! Ideal truth-table behavior of every gate variant.

use num_complex::Complex64 as C64;

use crate::circuits::GateVariant;
use crate::state::PHOTONIC_DIM;

/// Photonic basis index after the ideal gate: each section flips its target
/// bit when both of its control bits are 1.
pub fn ideal_apply(variant: GateVariant, index: usize) -> usize {
    assert!(index < PHOTONIC_DIM, "photonic index out of range");
    // sections read the input, so hybrid sections never see each other's flips
    variant.sections().iter().fold(index, |out, s| {
        let on = |bit: usize| (index >> bit) & 1 == 1;
        if on(s.control_a_addr().bit()) && on(s.control_b_addr().bit()) {
            out ^ (1 << s.target_addr().bit())
        } else {
            out
        }
    })
}

/// The ideal 64x64 operator of one variant, `matrix[out][in]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealOracle {
    pub variant: GateVariant,
    pub matrix: Vec<Vec<C64>>,
}

impl IdealOracle {
    pub fn new(variant: GateVariant) -> Self {
        let mut matrix = vec![vec![C64::new(0.0, 0.0); PHOTONIC_DIM]; PHOTONIC_DIM];
        for i in 0..PHOTONIC_DIM {
            matrix[ideal_apply(variant, i)][i] = C64::new(1.0, 0.0);
        }
        Self { variant, matrix }
    }

    pub fn apply(&self, photonic: &[C64]) -> Vec<C64> {
        assert_eq!(photonic.len(), PHOTONIC_DIM);
        let mut out = vec![C64::new(0.0, 0.0); PHOTONIC_DIM];
        for (i, a) in photonic.iter().enumerate() {
            out[ideal_apply(self.variant, i)] += a;
        }
        out
    }

    pub fn is_unitary(&self) -> bool {
        (0..PHOTONIC_DIM).all(|i| {
            (0..PHOTONIC_DIM).all(|j| {
                let dot: C64 = (0..PHOTONIC_DIM).map(|k| self.matrix[k][i].conj() * self.matrix[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                (dot - expected).norm() < 1e-12
            })
        })
    }

    /// Largest elementwise deviation between `op / s` and the oracle, where
    /// `s` is the complex scale read off the largest entry of `op`. `None`
    /// when `op` is zero.
    pub fn deviation(&self, op: &[Vec<C64>]) -> Option<f64> {
        let mut pivot = (0, 0, 0.0);
        for (r, row) in op.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if v.norm() > pivot.2 {
                    pivot = (r, c, v.norm());
                }
            }
        }
        if pivot.2 == 0.0 || self.matrix[pivot.0][pivot.1].norm() == 0.0 {
            return if pivot.2 == 0.0 { None } else { Some(f64::INFINITY) };
        }
        let scale = op[pivot.0][pivot.1] / self.matrix[pivot.0][pivot.1];
        let mut worst: f64 = 0.0;
        for (r, row) in op.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                worst = worst.max((v / scale - self.matrix[r][c]).norm());
            }
        }
        Some(worst)
    }
}

/// Largest elementwise deviation between two operators after matching the
/// global scale of `b` to `a`, normalized by the largest entry of `a`.
pub fn operator_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let flat_a: Vec<C64> = a.iter().flatten().copied().collect();
    let flat_b: Vec<C64> = b.iter().flatten().copied().collect();
    let nb: f64 = flat_b.iter().map(|x| x.norm_sqr()).sum();
    if nb == 0.0 {
        return flat_a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    }
    let overlap: C64 = flat_b.iter().zip(&flat_a).map(|(x, y)| x.conj() * y).sum();
    let scale = overlap / nb;
    let peak = flat_a.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    flat_a.iter().zip(&flat_b).map(|(x, y)| (x - scale * y).norm()).fold(0.0, f64::max) / peak
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table_examples() {
        // a^p = b^p = 1, c^p = 0, spatial bits of a and c set
        let i = 0b10_0111;
        assert_eq!(ideal_apply(GateVariant::PolToffoli, i), i | 0b01_0000);
        assert_eq!(ideal_apply(GateVariant::PolToffoli, 0), 0);
        assert_eq!(ideal_apply(GateVariant::SpatialToffoli, 0b00_1010), 0b10_1010);
        assert_eq!(ideal_apply(GateVariant::HyperToffoli, 0b00_1111), 0b11_1111);
        // a^p and b^p drive c^s in the first hybrid
        assert_eq!(ideal_apply(GateVariant::Hybrid1, 0b00_0101), 0b10_0101);
        // a^p and b^s drive c^s, a^s and b^p drive c^p
        assert_eq!(ideal_apply(GateVariant::Hybrid2, 0b00_1001), 0b10_1001);
        assert_eq!(ideal_apply(GateVariant::Hybrid2, 0b00_0110), 0b01_0110);
        assert_eq!(ideal_apply(GateVariant::Hybrid3, 0b00_1001), 0b01_1001);
    }

    #[test]
    fn involution_and_unitarity() {
        for v in GateVariant::ALL {
            for i in 0..PHOTONIC_DIM {
                assert_eq!(ideal_apply(v, ideal_apply(v, i)), i);
            }
            assert!(IdealOracle::new(v).is_unitary());
        }
    }

    #[test]
    fn hyper_is_tensor_of_two_toffolis() {
        for i in 0..PHOTONIC_DIM {
            let p = ideal_apply(GateVariant::PolToffoli, i);
            let s = ideal_apply(GateVariant::SpatialToffoli, i);
            assert_eq!(ideal_apply(GateVariant::HyperToffoli, i), (p & 0b01_0101) | (s & 0b10_1010));
        }
    }

    #[test]
    fn deviation_ignores_global_scale() {
        let o = IdealOracle::new(GateVariant::HyperToffoli);
        let scaled: Vec<Vec<C64>> =
            o.matrix.iter().map(|r| r.iter().map(|x| x * C64::new(0.3, -0.4)).collect()).collect();
        assert!(o.deviation(&scaled).unwrap() < 1e-15);
        let other = IdealOracle::new(GateVariant::PolToffoli);
        assert!(o.deviation(&other.matrix).unwrap() > 0.5);
        assert!(operator_distance(&scaled, &o.matrix) < 1e-14);
    }
}
