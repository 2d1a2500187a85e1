//! Small integrator toolbox: an adaptive Dormand–Prince 5(4) pair for
//! generic first-order systems, symplectic leapfrog / 4th-order
//! composition steppers for separable mechanical systems, and the
//! Gauss–Legendre nodes used for Lie-series quadrature.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[0, 1]`, 8 points.
pub const GAUSS8: [(f64, f64); 8] = [
    (0.019855071751231884, 0.050614268145188130),
    (0.101666761293186630, 0.111190517226687235),
    (0.237233795041835507, 0.156853322938943644),
    (0.408282678752175097, 0.181341891689180991),
    (0.591717321247824903, 0.181341891689180991),
    (0.762766204958164493, 0.156853322938943644),
    (0.898333238706813370, 0.111190517226687235),
    (0.980144928248768116, 0.050614268145188130),
];

/// Dormand–Prince 5(4) adaptive step integrator. Integrates
/// `y' = f(t, y)` from `t0` to `t1` in place.
pub fn dp45(
    f: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    y: &mut Vec<f64>,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Result<()> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // embedded 4th-order weights
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let dim = y.len();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(());
    }
    let dir = span.signum();
    let mut t = t0;
    let mut h = span * 0.1;
    let h_min = span.abs() * 1e-14;
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ytmp = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    f(t, y, &mut k1);
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::StepRejected(t));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for i in 0..dim {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + h / 5.0, &ytmp, &mut k2);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + 3.0 * h / 10.0, &ytmp, &mut k3);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + 4.0 * h / 5.0, &ytmp, &mut k4);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + 8.0 * h / 9.0, &ytmp, &mut k5);
        for i in 0..dim {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ytmp, &mut k6);
        for i in 0..dim {
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(t + h, &y5, &mut k7);
        // error estimate: 5th-order minus embedded 4th-order
        let mut err = 0.0f64;
        for i in 0..dim {
            let y4 = y[i]
                + h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                    + E7 * k7[i]);
            let sc = atol + rtol * y5[i].abs().max(y[i].abs());
            err += ((y5[i] - y4) / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            k1.copy_from_slice(&k7); // FSAL
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < h_min {
            return Err(Error::StepRejected(t));
        }
    }
    Ok(())
}

/// One velocity-Verlet (leapfrog) step for `q'' = force(q, t)`.
pub fn verlet_step(
    q: &mut f64,
    v: &mut f64,
    t: f64,
    dt: f64,
    force: &mut dyn FnMut(f64, f64) -> f64,
) {
    let a0 = force(*q, t);
    *q += dt * (*v + 0.5 * dt * a0);
    let a1 = force(*q, t + dt);
    *v += 0.5 * dt * (a0 + a1);
}

/// One 4th-order symplectic composition step (three leapfrogs with the
/// Yoshida coefficients).
pub fn yoshida4_step(
    q: &mut f64,
    v: &mut f64,
    t: f64,
    dt: f64,
    force: &mut dyn FnMut(f64, f64) -> f64,
) {
    const CBRT2: f64 = 1.259_921_049_894_873_2;
    let w1 = 1.0 / (2.0 - CBRT2);
    let w0 = -CBRT2 / (2.0 - CBRT2);
    let mut tt = t;
    for w in [w1, w0, w1] {
        verlet_step(q, v, tt, w * dt, force);
        tt += w * dt;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss8_integrates_polynomials_exactly() {
        // exact for degree <= 15
        for p in 0..=15u32 {
            let got: f64 = GAUSS8.iter().map(|&(x, w)| w * x.powi(p as i32)).sum();
            assert_relative_eq!(got, 1.0 / (p as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn dp45_harmonic_oscillator() {
        let mut y = vec![1.0, 0.0];
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        dp45(&mut f, &mut y, 0.0, std::f64::consts::TAU, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(y[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn verlet_bounded_energy_error() {
        let mut q = 1.0;
        let mut v = 0.0;
        let mut force = |x: f64, _t: f64| -x;
        let dt = 1e-3;
        let h0 = 0.5;
        let mut worst = 0.0f64;
        let mut t = 0.0;
        for _ in 0..100_000 {
            verlet_step(&mut q, &mut v, t, dt, &mut force);
            t += dt;
            let h = 0.5 * (v * v + q * q);
            worst = worst.max((h - h0).abs() / h0);
        }
        assert!(worst < 1e-6, "energy drift {worst}");
    }

    #[test]
    fn yoshida4_beats_verlet_order() {
        let run = |dt: f64| -> f64 {
            let mut q = 1.0;
            let mut v = 0.0;
            let mut force = |x: f64, _t: f64| -x;
            let steps = (std::f64::consts::TAU / dt) as usize;
            let mut t = 0.0;
            for _ in 0..steps {
                yoshida4_step(&mut q, &mut v, t, dt, &mut force);
                t += dt;
            }
            let h = 0.5 * (v * v + q * q);
            (h - 0.5).abs()
        };
        let e1 = run(0.02);
        let e2 = run(0.01);
        // 4th order: error ratio ~ 16
        assert!(e1 / e2 > 8.0, "ratio {} too small", e1 / e2);
    }
}
