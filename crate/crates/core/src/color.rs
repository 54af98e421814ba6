//! sRGB ⇄ CIE L*a*b* (D65) conversion.

use serde::{Deserialize, Serialize};

// D65 reference white, Y normalized to 1.
const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];
const DELTA: f64 = 6.0 / 29.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }

    /// CIE76 color difference.
    pub fn delta_e(&self, other: &LabColor) -> f64 {
        self.delta_e_squared(other).sqrt()
    }

    pub fn delta_e_squared(&self, other: &LabColor) -> f64 {
        let dl = self.l - other.l;
        let da = self.a - other.a;
        let db = self.b - other.b;
        dl * dl + da * da + db * db
    }
}

fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.040_45 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_to_srgb(v: f64) -> f64 {
    if v <= 0.003_130_8 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

fn lab_f(t: f64) -> f64 {
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

fn lab_f_inv(t: f64) -> f64 {
    if t > DELTA {
        t * t * t
    } else {
        3.0 * DELTA * DELTA * (t - 4.0 / 29.0)
    }
}

pub fn srgb_to_lab(rgb: [f32; 3]) -> LabColor {
    let [r, g, b] = rgb.map(|v| srgb_to_linear((v as f64).clamp(0.0, 1.0)));
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let fx = lab_f(x / WHITE[0]);
    let fy = lab_f(y / WHITE[1]);
    let fz = lab_f(z / WHITE[2]);
    LabColor {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Inverse of [`srgb_to_lab`]; out-of-gamut results are clamped.
pub fn lab_to_srgb(lab: LabColor) -> [f32; 3] {
    let fy = (lab.l + 16.0) / 116.0;
    let fx = fy + lab.a / 500.0;
    let fz = fy - lab.b / 200.0;
    let x = WHITE[0] * lab_f_inv(fx);
    let y = WHITE[1] * lab_f_inv(fy);
    let z = WHITE[2] * lab_f_inv(fz);
    let r = 3.240_454_2 * x - 1.537_138_5 * y - 0.498_531_4 * z;
    let g = -0.969_266_0 * x + 1.876_010_8 * y + 0.041_556_0 * z;
    let b = 0.055_643_4 * x - 0.204_025_9 * y + 1.057_225_2 * z;
    [r, g, b].map(|v| linear_to_srgb(v.max(0.0)).clamp(0.0, 1.0) as f32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn white_and_black() {
        let w = srgb_to_lab([1.0, 1.0, 1.0]);
        assert!((w.l - 100.0).abs() < 1e-3, "{w:?}");
        assert!(w.a.abs() < 1e-2 && w.b.abs() < 1e-2, "{w:?}");
        let k = srgb_to_lab([0.0, 0.0, 0.0]);
        assert!(k.l.abs() < 1e-9 && k.a.abs() < 1e-9 && k.b.abs() < 1e-9);
    }

    #[test]
    fn pure_red_reference_values() {
        // Reference: CIE formula evaluated for sRGB (1,0,0) under D65.
        let r = srgb_to_lab([1.0, 0.0, 0.0]);
        assert!((r.l - 53.24).abs() < 0.05, "{r:?}");
        assert!((r.a - 80.09).abs() < 0.05, "{r:?}");
        assert!((r.b - 67.20).abs() < 0.05, "{r:?}");
    }

    proptest! {
        #[test]
        fn roundtrip_within_one_code_value(r in 0.0f32..=1.0, g in 0.0f32..=1.0, b in 0.0f32..=1.0) {
            let back = lab_to_srgb(srgb_to_lab([r, g, b]));
            for (x, y) in [r, g, b].iter().zip(back.iter()) {
                prop_assert!((x - y).abs() <= 1.0 / 255.0);
            }
        }
    }
}
