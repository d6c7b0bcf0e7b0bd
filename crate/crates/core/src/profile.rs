//! Compactly supported smooth profiles built from the bump `exp(-1/(1-t^2))`.

use std::sync::LazyLock;

/// `exp(-1/(1-t^2))` on `(-1, 1)`, zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

const TABLE_INTERVALS: usize = 4096;

// 5-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

struct StepTable {
    values: Vec<f64>,
    // d(step)/ds = 2 bump(2s-1) / total
    scale: f64,
}

static STEP: LazyLock<StepTable> = LazyLock::new(|| {
    let h = 2.0 / TABLE_INTERVALS as f64;
    let mut values = Vec::with_capacity(TABLE_INTERVALS + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for i in 0..TABLE_INTERVALS {
        let a = -1.0 + i as f64 * h;
        let mid = a + 0.5 * h;
        let piece: f64 = GL_NODES
            .iter()
            .zip(GL_WEIGHTS)
            .map(|(x, w)| w * bump(mid + 0.5 * h * x))
            .sum();
        acc += 0.5 * h * piece;
        values.push(acc);
    }
    let total = acc;
    for v in &mut values {
        *v /= total;
    }
    StepTable {
        values,
        scale: 2.0 / total,
    }
});

/// Smooth monotone transition: 0 for `s <= 0`, 1 for `s >= 1`, the normalized
/// running integral of the bump in between (cubic Hermite on a fine table).
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let table = &*STEP;
    let x = s * TABLE_INTERVALS as f64;
    let i = (x.floor() as usize).min(TABLE_INTERVALS - 1);
    let w = x - i as f64;
    let ds = 1.0 / TABLE_INTERVALS as f64;
    let deriv = |k: usize| table.scale * bump(2.0 * (k as f64 * ds) - 1.0);
    let (y0, y1) = (table.values[i], table.values[i + 1]);
    let (m0, m1) = (deriv(i) * ds, deriv(i + 1) * ds);
    let w2 = w * w;
    let w3 = w2 * w;
    let v = (2.0 * w3 - 3.0 * w2 + 1.0) * y0
        + (w3 - 2.0 * w2 + w) * m0
        + (-2.0 * w3 + 3.0 * w2) * y1
        + (w3 - w2) * m1;
    v.clamp(y0, y1)
}

/// Even smooth profile equal to 1 on `[-plateau, plateau]`, vanishing outside
/// `(-support, support)`.
pub fn smoothed_indicator(t: f64, plateau: f64, support: f64) -> f64 {
    debug_assert!(0.0 <= plateau && plateau < support);
    let a = t.abs();
    if a <= plateau {
        1.0
    } else if a >= support {
        0.0
    } else {
        1.0 - smooth_step((a - plateau) / (support - plateau))
    }
}

/// Cubic smoothstep `3s^2 - 2s^3` clamped to `[0, 1]`.
pub fn cubic_step(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}
