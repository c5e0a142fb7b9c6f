use std::f64::consts::TAU;

use super::kinds::ParamKind;

/// Uniform binning of the three continuous scalar types.
///
/// `bin = clamp(floor((v - lo) / (hi - lo) * n), 0, n - 1)`; dequantization
/// returns the bin center. Angles are wrapped into `[0, 2π)` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationSpec {
    pub coord_bins: u16,
    pub length_bins: u16,
    pub angle_bins: u16,
}

impl Default for QuantizationSpec {
    fn default() -> Self {
        Self { coord_bins: 80, length_bins: 20, angle_bins: 30 }
    }
}

impl QuantizationSpec {
    pub fn bins(&self, kind: ParamKind) -> u16 {
        match kind {
            ParamKind::Coord => self.coord_bins,
            ParamKind::Length => self.length_bins,
            ParamKind::Angle => self.angle_bins,
        }
    }

    pub fn range(&self, kind: ParamKind) -> (f64, f64) {
        match kind {
            ParamKind::Coord => (-1.0, 1.0),
            ParamKind::Length => (0.0, 2.0),
            ParamKind::Angle => (0.0, TAU),
        }
    }

    pub fn bin_width(&self, kind: ParamKind) -> f64 {
        let (lo, hi) = self.range(kind);
        (hi - lo) / f64::from(self.bins(kind))
    }

    pub fn quantize(&self, kind: ParamKind, value: f64) -> u16 {
        let value = if kind == ParamKind::Angle { value.rem_euclid(TAU) } else { value };
        let (lo, hi) = self.range(kind);
        let n = self.bins(kind);
        let raw = ((value - lo) / (hi - lo) * f64::from(n)).floor();
        if raw.is_nan() || raw < 0.0 {
            0
        } else if raw >= f64::from(n - 1) {
            n - 1
        } else {
            raw as u16
        }
    }

    pub fn dequantize(&self, kind: ParamKind, bin: u16) -> f64 {
        let (lo, _) = self.range(kind);
        lo + (f64::from(bin) + 0.5) * self.bin_width(kind)
    }

    /// Correctness tolerance in bins: 10% of the quantization levels, rounded down.
    pub fn tolerance(&self, kind: ParamKind) -> u16 {
        self.bins(kind) / 10
    }

    /// Bin distance; angles wrap around.
    pub fn bin_distance(&self, kind: ParamKind, a: u16, b: u16) -> u16 {
        let d = a.abs_diff(b);
        if kind == ParamKind::Angle {
            d.min(self.angle_bins - d)
        } else {
            d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bin_counts_and_rule() {
        let q = QuantizationSpec::default();
        assert_eq!(q.bins(ParamKind::Coord), 80);
        assert_eq!(q.bins(ParamKind::Length), 20);
        assert_eq!(q.bins(ParamKind::Angle), 30);
        assert_eq!(q.quantize(ParamKind::Coord, 0.0), 40);
        assert_eq!(q.quantize(ParamKind::Coord, -1.0), 0);
        assert_eq!(q.quantize(ParamKind::Coord, 1.0), 79);
        assert_eq!(q.quantize(ParamKind::Length, 5.0), 19);
        assert_eq!(q.quantize(ParamKind::Angle, TAU), 0);
        assert_eq!(q.quantize(ParamKind::Angle, -0.01), 29);
    }

    #[test]
    fn tolerances_round_down() {
        let q = QuantizationSpec::default();
        assert_eq!(q.tolerance(ParamKind::Coord), 8);
        assert_eq!(q.tolerance(ParamKind::Length), 2);
        assert_eq!(q.tolerance(ParamKind::Angle), 3);
        assert_eq!(q.bin_distance(ParamKind::Angle, 0, 29), 1);
    }

    fn kind() -> impl Strategy<Value = ParamKind> {
        prop_oneof![Just(ParamKind::Coord), Just(ParamKind::Length), Just(ParamKind::Angle)]
    }

    proptest! {
        #[test]
        fn quantize_is_idempotent_through_centers(k in kind(), v in -3.0f64..8.0) {
            let q = QuantizationSpec::default();
            let b = q.quantize(k, v);
            prop_assert_eq!(q.quantize(k, q.dequantize(k, b)), b);
        }

        #[test]
        fn quantize_is_monotone(k in prop_oneof![Just(ParamKind::Coord), Just(ParamKind::Length)],
                                a in -3.0f64..3.0, d in 0.0f64..3.0) {
            let q = QuantizationSpec::default();
            prop_assert!(q.quantize(k, a) <= q.quantize(k, a + d));
        }
    }
}
