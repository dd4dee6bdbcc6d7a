//! Gauss–Hermite quadrature of the Kerr phase noise.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_rate, KrausChannel};
use crate::error::Result;
use crate::fock::FockSpace;
use crate::gates::{noisy_fredkin_sample, FredkinModes};

const NEWTON_STEPS: usize = 100;

/// Nodes and weights for `∫ e^{-x²} f(x) dx ≈ Σ w_i f(x_i)`, ascending in `x`.
///
/// Roots of `H_n` are found by Newton iteration on the orthonormal Hermite
/// recurrence, starting from the usual asymptotic guesses.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..NEWTON_STEPS {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// Dephased Fredkin gate as the `n`-node quadrature of `V(ε)ρV(ε)†` over
/// `ε ~ N(0, 2λ)`.
pub fn dephased_fredkin_quadrature(
    space: &FockSpace,
    modes: FredkinModes,
    lambda: f64,
    nodes: usize,
) -> Result<KrausChannel> {
    check_rate("lambda", lambda)?;
    let (x, w) = gauss_hermite(nodes);
    let scale = 2.0 * lambda.sqrt();
    let ops = x
        .iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            let v = noisy_fredkin_sample(space, modes, scale * xi)?;
            Ok(v.matrix() * Complex64::new((wi / PI.sqrt()).sqrt(), 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(*space, ops)
}
