//! Statevector simulation of the layered Ry/MS ansatz and correlator
//! expectation values. Qubit `q` is bit `q` of the amplitude index.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::CircuitSpec;
use crate::encoding::{EncodingMap, Species};
use crate::{rng, Error, Result};

pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvSource {
    Exact,
    Sampled { shots: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvVector {
    pub values: Vec<f64>,
    pub source: EvSource,
}

impl EvVector {
    pub fn exact(values: Vec<f64>) -> Self {
        EvVector {
            values,
            source: EvSource::Exact,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        if n > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Ry(theta) = exp(-i theta Y / 2) on qubit `q`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        ry_kernel(&mut self.amps, q, theta);
    }

    /// Ry(theta) on every qubit, one sweep per qubit.
    pub fn apply_ry_all(&mut self, theta: f64) {
        for q in 0..self.n {
            self.apply_ry(q, theta);
        }
    }

    /// MS(theta) = exp(-i theta/4 (XX + YY)) on qubits `a`, `b`.
    pub fn apply_ms(&mut self, a: usize, b: usize, theta: f64) {
        ms_kernel(&mut self.amps, a, b, theta);
    }

    fn apply_h(&mut self, q: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bit = 1usize << q;
        for block in self.amps.chunks_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = (x + y) * r;
                *a1 = (x - y) * r;
            }
        }
    }

    fn apply_sdg(&mut self, q: usize) {
        let bit = 1usize << q;
        let mi = Complex64::new(0.0, -1.0);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx & bit != 0 {
                *amp *= mi;
            }
        }
    }

    /// Computational-basis probabilities after rotating every qubit into the
    /// measurement basis of `species` (H for X, S-dagger then H for Y).
    fn probabilities_in(&self, species: Species) -> Vec<f64> {
        let mut rotated;
        let st = match species {
            Species::ZZ => self,
            Species::XX => {
                rotated = self.clone();
                for q in 0..self.n {
                    rotated.apply_h(q);
                }
                &rotated
            }
            Species::YY => {
                rotated = self.clone();
                for q in 0..self.n {
                    rotated.apply_sdg(q);
                    rotated.apply_h(q);
                }
                &rotated
            }
        };
        st.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn ry_kernel(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bit = 1usize << q;
    for block in amps.chunks_mut(2 * bit) {
        let (lo, hi) = block.split_at_mut(bit);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = x * c - y * s;
            *a1 = x * s + y * c;
        }
    }
}

fn ms_kernel(amps: &mut [Complex64], a: usize, b: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let (lo, hi) = (a.min(b), a.max(b));
    let (bl, bh) = (1usize << lo, 1usize << hi);
    let mis = Complex64::new(0.0, -s);
    // walk indices with both bits clear, mixing |..0..1..> and |..1..0..>
    for outer in (0..amps.len()).step_by(2 * bh) {
        for mid in (outer..outer + bh).step_by(2 * bl) {
            for idx in mid..mid + bl {
                let (i, j) = (idx | bl, idx | bh);
                let x = amps[i];
                let y = amps[j];
                amps[i] = x * c + y * mis;
                amps[j] = x * mis + y * c;
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Gate {
    Ry(usize, f64),
    Ms(usize, usize, f64),
}

impl Gate {
    fn top(&self) -> usize {
        match *self {
            Gate::Ry(q, _) => q,
            Gate::Ms(a, b, _) => a.max(b),
        }
    }

    fn apply(&self, amps: &mut [Complex64]) {
        match *self {
            Gate::Ry(q, t) => ry_kernel(amps, q, t),
            Gate::Ms(a, b, t) => ms_kernel(amps, a, b, t),
        }
    }
}

/// Qubits below this index are handled in cache-sized blocks.
const BLOCK_QUBITS: usize = 13;

/// Applies `gates` in order. Runs of gates that only touch qubits below
/// `block` act independently on each `2^block` slice, so a whole run is
/// applied slice by slice while the slice is hot in cache.
fn run_gates(st: &mut StateVector, gates: &[Gate], block: usize) {
    let block = block.min(st.n);
    let mut k = 0;
    while k < gates.len() {
        if gates[k].top() >= block {
            gates[k].apply(&mut st.amps);
            k += 1;
            continue;
        }
        let end = (k..gates.len())
            .find(|&e| gates[e].top() >= block)
            .unwrap_or(gates.len());
        for chunk in st.amps.chunks_mut(1 << block) {
            for g in &gates[k..end] {
                g.apply(chunk);
            }
        }
        k = end;
    }
}

fn circuit_gates(spec: &CircuitSpec, params: &[f64]) -> Vec<Gate> {
    let mut gates = Vec::with_capacity((spec.p + 1) * spec.n + spec.gate_count());
    for (l, layer) in spec.layers.iter().enumerate() {
        let theta = params[CircuitSpec::theta_index(l)];
        gates.extend((0..spec.n).map(|q| Gate::Ry(q, theta)));
        let phi = params[CircuitSpec::phi_index(l)];
        gates.extend(layer.pairs.iter().map(|&(a, b)| Gate::Ms(a, b, phi)));
    }
    let theta = params[CircuitSpec::theta_index(spec.p)];
    gates.extend((0..spec.n).map(|q| Gate::Ry(q, theta)));
    gates
}

/// Runs the circuit from `|0...0>`.
pub fn simulate(spec: &CircuitSpec, params: &[f64]) -> Result<StateVector> {
    simulate_blocked(spec, params, BLOCK_QUBITS)
}

fn simulate_blocked(spec: &CircuitSpec, params: &[f64], block: usize) -> Result<StateVector> {
    if params.len() != spec.param_count() {
        return Err(Error::ParamLengthMismatch {
            expected: spec.param_count(),
            found: params.len(),
        });
    }
    let mut st = StateVector::zero(spec.n)?;
    run_gates(&mut st, &circuit_gates(spec, params), block);
    Ok(st)
}

fn check_qubits(state: &StateVector, enc: &EncodingMap) -> Result<()> {
    if state.n != enc.n {
        return Err(Error::QubitMismatch {
            state: state.n,
            encoding: enc.n,
        });
    }
    Ok(())
}

fn parity_sign(idx: usize, mask: usize) -> f64 {
    if (idx & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// In-place Walsh-Hadamard transform: `out[mask] = sum_x p[x] (-1)^{|x & mask|}`.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Exact `<P_k>` for every slot of the encoding.
pub fn expectations(state: &StateVector, enc: &EncodingMap) -> Result<EvVector> {
    check_qubits(state, enc)?;
    let mut values = vec![0.0; enc.m()];
    for species in Species::ALL {
        let slots: Vec<usize> = (0..enc.m())
            .filter(|&k| enc.slots[k].species == species)
            .collect();
        if slots.is_empty() {
            continue;
        }
        let mut probs = state.probabilities_in(species);
        if slots.len() > state.n {
            walsh_hadamard(&mut probs);
            for k in slots {
                let s = &enc.slots[k];
                values[k] = probs[(1 << s.a) | (1 << s.b)];
            }
        } else {
            for k in slots {
                let s = &enc.slots[k];
                let mask = (1 << s.a) | (1 << s.b);
                values[k] = probs
                    .iter()
                    .enumerate()
                    .map(|(x, p)| p * parity_sign(x, mask))
                    .sum();
            }
        }
    }
    for v in &mut values {
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(EvVector::exact(values))
}

/// Shot-based estimate: `shots` samples per measurement setting, each
/// correlator read off as the mean parity of its two bits.
pub fn sample_expectations(
    state: &StateVector,
    enc: &EncodingMap,
    shots: usize,
    seed: u64,
) -> Result<EvVector> {
    check_qubits(state, enc)?;
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut values = vec![0.0; enc.m()];
    for (setting, species) in Species::ALL.into_iter().enumerate() {
        let slots: Vec<usize> = (0..enc.m())
            .filter(|&k| enc.slots[k].species == species)
            .collect();
        if slots.is_empty() {
            continue;
        }
        let probs = state.probabilities_in(species);
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let mut r = rng::stream(seed, setting as u64);
        let mut sums = vec![0i64; slots.len()];
        for _ in 0..shots {
            let u: f64 = r.random::<f64>() * acc;
            let x = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            for (t, &k) in slots.iter().enumerate() {
                let s = &enc.slots[k];
                sums[t] += if ((x >> s.a) ^ (x >> s.b)) & 1 == 0 { 1 } else { -1 };
            }
        }
        for (t, &k) in slots.iter().enumerate() {
            values[k] = (sums[t] as f64 / shots as f64).clamp(-1.0, 1.0);
        }
    }
    Ok(EvVector {
        values,
        source: EvSource::Sampled { shots },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_circuit, select_topology, PairImportance, Topology};
    use crate::encoding::{assign_correlators, AssignPolicy, Slot};
    use nalgebra::DMatrix;
    use rand::Rng;
    use std::f64::consts::PI;

    type M = DMatrix<Complex64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli(s: char) -> M {
        match s {
            'I' => M::identity(2, 2),
            'X' => M::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            'Y' => M::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            _ => M::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        }
    }

    // operator on n qubits, qubit 0 least significant => rightmost factor
    fn embed(n: usize, ops: &[(usize, &M)]) -> M {
        let mut out = M::identity(1, 1);
        for q in (0..n).rev() {
            let f = ops
                .iter()
                .find(|(k, _)| *k == q)
                .map(|(_, m)| (*m).clone())
                .unwrap_or_else(|| M::identity(2, 2));
            out = out.kronecker(&f);
        }
        out
    }

    // exp(-i a G) for Hermitian G with G^2 = I is cos(a) I - i sin(a) G
    fn exp_herm_involution(g: &M, a: f64) -> M {
        let d = g.nrows();
        M::identity(d, d) * c(a.cos(), 0.0) - g * c(0.0, a.sin())
    }

    fn ry_matrix(theta: f64) -> M {
        exp_herm_involution(&pauli('Y'), theta / 2.0)
    }

    // exp(-i t/4 (XX + YY)); XX and YY commute and each squares to I
    fn ms_matrix(n: usize, a: usize, b: usize, theta: f64) -> M {
        let (x, y) = (pauli('X'), pauli('Y'));
        let xx = embed(n, &[(a, &x), (b, &x)]);
        let yy = embed(n, &[(a, &y), (b, &y)]);
        exp_herm_involution(&xx, theta / 4.0) * exp_herm_involution(&yy, theta / 4.0)
    }

    fn dense_state(spec: &CircuitSpec, params: &[f64]) -> Vec<Complex64> {
        let n = spec.n;
        let dim = 1 << n;
        let mut u = M::identity(dim, dim);
        let ry_layer = |t: f64| {
            let r = ry_matrix(t);
            let ops: Vec<(usize, &M)> = (0..n).map(|q| (q, &r)).collect();
            embed(n, &ops)
        };
        for (l, layer) in spec.layers.iter().enumerate() {
            u = ry_layer(params[2 * l]) * u;
            for &(a, b) in &layer.pairs {
                u = ms_matrix(n, a, b, params[2 * l + 1]) * u;
            }
        }
        u = ry_layer(params[2 * spec.p]) * u;
        u.column(0).iter().copied().collect()
    }

    fn dense_ev(n: usize, psi: &[Complex64], slot: &Slot) -> f64 {
        let p = match slot.species {
            Species::XX => pauli('X'),
            Species::YY => pauli('Y'),
            Species::ZZ => pauli('Z'),
        };
        let op = embed(n, &[(slot.a, &p), (slot.b, &p)]);
        let v = nalgebra::DVector::from_column_slice(psi);
        (v.adjoint() * op * &v)[(0, 0)].re
    }

    #[test]
    fn zero_params_identity() {
        let spec = build_circuit(3, 2, &[vec![(0, 1), (1, 2)]]).unwrap();
        let st = simulate(&spec, &[0.0; 5]).unwrap();
        assert_eq!(st, StateVector::zero(3).unwrap());
    }

    #[test]
    fn ms_pi_swaps_with_phase() {
        let mut st = StateVector::basis(2, 0b01).unwrap();
        st.apply_ms(0, 1, PI);
        let a = st.amplitudes();
        assert!((a[0b10] - c(0.0, -1.0)).norm() < 1e-12);
        assert!(a[0b01].norm() < 1e-12);
        // matrix-exponential oracle agrees
        let m = ms_matrix(2, 0, 1, PI);
        assert!((m[(0b10, 0b01)] - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn ms_fixes_00_and_11() {
        for theta in [0.3, 1.0, 2.5, -4.0] {
            for idx in [0b00, 0b11] {
                let mut st = StateVector::basis(2, idx).unwrap();
                st.apply_ms(0, 1, theta);
                assert_eq!(st, StateVector::basis(2, idx).unwrap());
            }
        }
    }

    #[test]
    fn gates_unitary() {
        for t in [0.1, 1.3, -2.9] {
            for g in [ry_matrix(t), ms_matrix(2, 0, 1, t)] {
                let d = g.nrows();
                let e = (g.adjoint() * &g - M::identity(d, d)).norm();
                assert!(e < 1e-12);
            }
        }
        // the kernel itself, column by column
        for t in [0.7, -2.2] {
            for col in 0..4 {
                let mut st = StateVector::basis(2, col).unwrap();
                st.apply_ms(1, 0, t);
                let want = ms_matrix(2, 0, 1, t);
                for row in 0..4 {
                    assert!((st.amplitudes()[row] - want[(row, col)]).norm() < 1e-12);
                }
                let mut st = StateVector::basis(2, col).unwrap();
                st.apply_ry(1, t);
                let want = embed(2, &[(1, &ry_matrix(t))]);
                for row in 0..4 {
                    assert!((st.amplitudes()[row] - want[(row, col)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn product_state_correlators() {
        let spec = build_circuit(2, 1, &[vec![(0, 1)]]).unwrap();
        let st = simulate(&spec, &[PI / 2.0, 0.0, 0.0]).unwrap();
        let enc = EncodingMap {
            n: 2,
            slots: Species::ALL
                .iter()
                .map(|&species| Slot { a: 0, b: 1, species })
                .collect(),
        };
        let ev = expectations(&st, &enc).unwrap();
        assert!((ev.values[0] - 1.0).abs() < 1e-12);
        assert!(ev.values[1].abs() < 1e-12);
        assert!(ev.values[2].abs() < 1e-12);
        let zero = StateVector::zero(2).unwrap();
        assert_eq!(expectations(&zero, &enc).unwrap().values[2], 1.0);
    }

    #[test]
    fn matches_dense_oracle() {
        let mut r = rng::seeded(99);
        for trial in 0..100 {
            let n = r.random_range(2..=4);
            let p = r.random_range(1..=4);
            let kind = Topology::ALL[r.random_range(0..4)];
            let mut imp = PairImportance::zeros(n);
            for a in 0..n {
                for b in (a + 1)..n {
                    imp.add(a, b, r.random::<f64>());
                }
            }
            let pairs = select_topology(kind, n, &imp, trial);
            let spec = build_circuit(n, p, &[pairs]).unwrap();
            let params: Vec<f64> = (0..spec.param_count())
                .map(|_| r.random_range(-PI..PI))
                .collect();
            let st = simulate(&spec, &params).unwrap();
            assert!((st.norm() - 1.0).abs() < 1e-10);
            let psi = dense_state(&spec, &params);
            for (x, y) in st.amplitudes().iter().zip(&psi) {
                assert!((x - y).norm() < 1e-9);
            }
            let enc =
                assign_correlators(3 * n * (n - 1) / 2, n, AssignPolicy::Lexicographic, 0).unwrap();
            let ev = expectations(&st, &enc).unwrap();
            for (k, slot) in enc.slots.iter().enumerate() {
                assert!((ev.values[k] - dense_ev(n, &psi, slot)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn walsh_path_matches_direct_sum() {
        let n = 5;
        let spec = build_circuit(n, 2, &[vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]]).unwrap();
        let st = simulate(&spec, &[0.3, 1.1, -0.7, 2.0, 0.4]).unwrap();
        let full = assign_correlators(30, n, AssignPolicy::Lexicographic, 0).unwrap();
        let few = EncodingMap {
            n,
            slots: full.slots[..3].to_vec(),
        };
        let a = expectations(&st, &full).unwrap();
        let b = expectations(&st, &few).unwrap();
        for k in 0..3 {
            assert!((a.values[k] - b.values[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn blocking_is_transparent() {
        let n = 7;
        let pairs = vec![(0, 6), (1, 2), (2, 5), (3, 4), (0, 3), (4, 6)];
        let spec = build_circuit(n, 3, &[pairs]).unwrap();
        let params = [0.3, 1.1, -0.7, 2.0, 0.4, -1.3, 0.9];
        let plain = simulate_blocked(&spec, &params, 0).unwrap();
        for block in [1, 2, 3, 5, 7, 13] {
            let st = simulate_blocked(&spec, &params, block).unwrap();
            for (x, y) in st.amplitudes().iter().zip(plain.amplitudes()) {
                assert!((x - y).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn errors() {
        let spec = build_circuit(2, 1, &[vec![(0, 1)]]).unwrap();
        assert!(matches!(
            simulate(&spec, &[0.0]),
            Err(Error::ParamLengthMismatch { expected: 3, found: 1 })
        ));
        assert!(matches!(StateVector::zero(25), Err(Error::RegisterTooLarge(25))));
        let st = StateVector::zero(3).unwrap();
        let enc = assign_correlators(3, 2, AssignPolicy::Lexicographic, 0).unwrap();
        assert!(matches!(expectations(&st, &enc), Err(Error::QubitMismatch { .. })));
        let enc = assign_correlators(3, 3, AssignPolicy::Lexicographic, 0).unwrap();
        assert!(matches!(sample_expectations(&st, &enc, 0, 1), Err(Error::ZeroShots)));
    }

    #[test]
    fn sampling_concentrates() {
        let n = 4;
        let spec = build_circuit(n, 2, &[vec![(0, 1), (1, 2), (2, 3)]]).unwrap();
        let st = simulate(&spec, &[0.4, 0.9, -1.2, 0.5, 0.8]).unwrap();
        let enc = assign_correlators(18, n, AssignPolicy::Lexicographic, 0).unwrap();
        let exact = expectations(&st, &enc).unwrap();
        let shots = 1 << 14;
        let s1 = sample_expectations(&st, &enc, shots, 5).unwrap();
        let s2 = sample_expectations(&st, &enc, shots, 5).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.source, EvSource::Sampled { shots });
        for (e, s) in exact.values.iter().zip(&s1.values) {
            let bound = 5.0 * ((1.0 - e * e) / shots as f64).sqrt();
            assert!((e - s).abs() <= bound + 1e-12, "{e} vs {s}");
        }
        // error shrinks with shots
        let err = |shots: usize| -> f64 {
            (0..8)
                .map(|sd| {
                    let s = sample_expectations(&st, &enc, shots, sd).unwrap();
                    s.values
                        .iter()
                        .zip(&exact.values)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                })
                .sum::<f64>()
        };
        let (e8, e12, e16) = (err(1 << 8), err(1 << 12), err(1 << 16));
        assert!(e12 < e8 && e16 < e12);
    }

    #[test]
    fn deterministic_basis_sample() {
        let st = StateVector::zero(2).unwrap();
        let enc = EncodingMap {
            n: 2,
            slots: vec![Slot {
                a: 0,
                b: 1,
                species: Species::ZZ,
            }],
        };
        assert_eq!(sample_expectations(&st, &enc, 7, 1).unwrap().values, vec![1.0]);
    }
}
