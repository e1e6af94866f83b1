//! Exponential integral for complex arguments.

use crate::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^z E₁(z)` on the principal branch (cut along the negative real axis).
///
/// The scaled form stays O(1/|z|) where `E₁` itself under- or overflows.
pub fn exp_e1(z: C64) -> C64 {
    if z.norm() < 2.0 {
        e1_series(z) * z.exp()
    } else {
        e1_continued_fraction(z)
    }
}

/// `E₁(z)` on the principal branch.
pub fn e1(z: C64) -> C64 {
    if z.norm() < 2.0 {
        e1_series(z)
    } else {
        e1_continued_fraction(z) * (-z).exp()
    }
}

fn e1_series(z: C64) -> C64 {
    // E₁(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k·k!)
    let mut sum = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Modified Lentz evaluation of
/// `e^z E₁(z) = 1/(z+1- 1²/(z+3- 2²/(z+5- ...)))`.
fn e1_continued_fraction(z: C64) -> C64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut f = d;
    for k in 1..20_000 {
        let a = -((k * k) as f64);
        b += 2.0;
        d = a * d + b;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = b + a / c;
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f
}
