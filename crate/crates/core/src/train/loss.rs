use crate::rna::QuboInstance;
use crate::{Error, Result};

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Soft occupations `x_i = logistic(-alpha e_i)`.
pub fn soft_bits(evs: &[f64], alpha: f64) -> Vec<f64> {
    evs.iter().map(|&e| logistic(-alpha * e)).collect()
}

fn check(evs: &[f64], inst: &QuboInstance, alpha: f64) -> Result<()> {
    if evs.len() != inst.m() {
        return Err(Error::LengthMismatch {
            expected: inst.m(),
            found: evs.len(),
        });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(())
}

fn quadratic(inst: &QuboInstance, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (a, &xa) in x.iter().enumerate() {
        if xa == 0.0 {
            continue;
        }
        let row = inst.row(a);
        let s: f64 = row.iter().zip(x).map(|(q, xb)| q * xb).sum();
        total += xa * s;
    }
    total
}

/// `x^T Q x` at the soft occupations of `evs`.
pub fn qubo_sigmoid_loss(evs: &[f64], inst: &QuboInstance, alpha: f64) -> Result<f64> {
    check(evs, inst, alpha)?;
    Ok(quadratic(inst, &soft_bits(evs, alpha)))
}

/// Analytic derivative of [`qubo_sigmoid_loss`] with respect to the EVs.
pub fn qubo_sigmoid_grad(evs: &[f64], inst: &QuboInstance, alpha: f64) -> Result<Vec<f64>> {
    check(evs, inst, alpha)?;
    let x = soft_bits(evs, alpha);
    Ok((0..inst.m())
        .map(|i| {
            let qx: f64 = inst.row(i).iter().zip(&x).map(|(q, xb)| q * xb).sum();
            2.0 * qx * (-alpha * x[i] * (1.0 - x[i]))
        })
        .collect())
}

/// Spin form of the scaled QUBO `Q / max|Q|` under `x = (1 - s) / 2`:
/// `E = sum_{a<b} J_ab s_a s_b + sum_a h_a s_a + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub m: usize,
    /// Upper-triangle couplings, row-major `m x m` with zeros elsewhere.
    pub j: Vec<f64>,
    pub h: Vec<f64>,
    pub constant: f64,
    pub scale: f64,
}

impl IsingModel {
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = (a.min(b), a.max(b));
        self.j[a * self.m + b]
    }

    pub fn energy(&self, s: &[f64]) -> f64 {
        let mut e = self.constant;
        for a in 0..self.m {
            e += self.h[a] * s[a];
            for b in (a + 1)..self.m {
                e += self.j[a * self.m + b] * s[a] * s[b];
            }
        }
        e
    }
}

pub fn ising_decomposition(inst: &QuboInstance) -> IsingModel {
    let m = inst.m();
    let max = inst.max_abs();
    let scale = if max > 0.0 { max } else { 1.0 };
    let mut j = vec![0.0; m * m];
    let mut h = vec![0.0; m];
    let mut constant = 0.0;
    for a in 0..m {
        let qaa = inst.get(a, a) / scale;
        h[a] -= qaa / 2.0;
        constant += qaa / 2.0;
        for b in (a + 1)..m {
            // Q_ab and Q_ba together weigh 2 Q_ab x_a x_b
            let q = inst.get(a, b) / scale;
            if q == 0.0 {
                continue;
            }
            j[a * m + b] = q / 2.0;
            h[a] -= q / 2.0;
            h[b] -= q / 2.0;
            constant += q / 2.0;
        }
    }
    IsingModel {
        m,
        j,
        h,
        constant,
        scale,
    }
}

/// Ising energy of the scaled QUBO at `s_i = tanh(alpha e_i)`.
pub fn ising_tanh_loss(evs: &[f64], inst: &QuboInstance, alpha: f64) -> Result<f64> {
    check(evs, inst, alpha)?;
    let model = ising_decomposition(inst);
    let s: Vec<f64> = evs.iter().map(|&e| (alpha * e).tanh()).collect();
    Ok(model.energy(&s))
}
