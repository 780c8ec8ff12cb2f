//! Exact five-qubit density-matrix model of one 15-to-1 distillation unit.
//!
//! Qubits 0..3 are the four check qubits and qubit 4 is the output; basis index
//! bit `q` is qubit `q`. All start in |+>. The protocol applies pi/8 Z-type
//! rotations on every non-empty subset `v` of the check qubits, with the output
//! qubit included when `v` has even weight (15 rotations in total). The four
//! single-qubit rotations come first, then the eleven multi-qubit ones, two
//! per time step of `d_m` code cycles over six steps. Finally the check qubits
//! are measured in the X basis and the unit is accepted on `++++`.
//!
//! Fault paths, all modelled as Pauli channels:
//!
//! * every rotation fails with a Z-type error on its support (`p_inj`);
//! * every multi-patch measurement fails time-like with probability `q_meas`,
//!   twirled into the same Z-type error with probability `q_meas / 2`;
//! * during each step every qubit idles for `d_m` cycles, flipping with the
//!   per-cycle Z and X rates given in [`NoiseParams`].
//!
//! With no noise the output is exactly the magic state and `p_accept = 1`.

use std::sync::OnceLock;

use num_complex::Complex64;

const QUBITS: usize = 5;
const DIM: usize = 1 << QUBITS;
const OUTPUT: usize = 4;
const STEPS: usize = 6;

type Matrix = Vec<Complex64>;

/// Per-fault-location error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p_inj: f64,
    pub q_meas: f64,
    /// Per-cycle idle Z-flip rate per qubit.
    pub idle_z: [f64; QUBITS],
    /// Per-cycle idle X-flip rate per qubit.
    pub idle_x: [f64; QUBITS],
    /// Code cycles per time step.
    pub cycles_per_step: u32,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams {
            p_inj: 0.0,
            q_meas: 0.0,
            idle_z: [0.0; QUBITS],
            idle_x: [0.0; QUBITS],
            cycles_per_step: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOutcome {
    /// Infidelity of the accepted output state.
    pub p_out: f64,
    pub p_accept: f64,
}

fn parity(x: usize) -> bool {
    x.count_ones() % 2 == 1
}

/// Support of the rotation for check-qubit subset `v`.
fn support(v: usize) -> usize {
    if parity(v) {
        v
    } else {
        v | (1 << OUTPUT)
    }
}

/// exp(-i theta Z_mask) rho exp(+i theta Z_mask).
fn rotate(rho: &mut Matrix, mask: usize, theta: f64) {
    let phase: Vec<Complex64> = (0..DIM)
        .map(|x| {
            let s = if parity(x & mask) { -1.0 } else { 1.0 };
            Complex64::from_polar(1.0, -theta * s)
        })
        .collect();
    for i in 0..DIM {
        for j in 0..DIM {
            rho[i * DIM + j] *= phase[i] * phase[j].conj();
        }
    }
}

/// rho -> (1 - p) rho + p P rho P with P = X^x_mask Z^z_mask (up to phase).
fn pauli_channel(rho: &mut Matrix, p: f64, x_mask: usize, z_mask: usize) {
    if p <= 0.0 {
        return;
    }
    let sign = |x: usize| if parity(x & z_mask) { -1.0 } else { 1.0 };
    let old = rho.clone();
    for a in 0..DIM {
        for b in 0..DIM {
            let (ax, bx) = (a ^ x_mask, b ^ x_mask);
            let flipped = old[ax * DIM + bx] * (sign(ax) * sign(bx));
            rho[a * DIM + b] = old[a * DIM + b] * (1.0 - p) + flipped * p;
        }
    }
}

/// Flip probability after `n` cycles at per-cycle rate `p` (clamped to [0, 1/2]).
pub fn compose_flips(p: f64, n: u32) -> f64 {
    let p = p.clamp(0.0, 0.5);
    (1.0 - (1.0 - 2.0 * p).powi(n as i32)) / 2.0
}

fn run(noise: &NoiseParams) -> [[Complex64; 2]; 2] {
    let mut rho = vec![Complex64::new(1.0 / DIM as f64, 0.0); DIM * DIM];
    let theta = std::f64::consts::FRAC_PI_8;
    let rotation = |rho: &mut Matrix, mask: usize, q_meas: f64| {
        rotate(rho, mask, theta);
        pauli_channel(rho, noise.p_inj, 0, mask);
        pauli_channel(rho, q_meas / 2.0, 0, mask);
    };
    for q in 0..4 {
        rotation(&mut rho, support(1 << q), 0.0);
    }
    let multi: Vec<usize> = (1..16usize).filter(|v| v.count_ones() > 1).collect();
    for chunk in multi.chunks(multi.len().div_ceil(STEPS)) {
        for &v in chunk {
            rotation(&mut rho, support(v), noise.q_meas);
        }
        for q in 0..QUBITS {
            pauli_channel(
                &mut rho,
                compose_flips(noise.idle_z[q], noise.cycles_per_step),
                0,
                1 << q,
            );
            pauli_channel(
                &mut rho,
                compose_flips(noise.idle_x[q], noise.cycles_per_step),
                1 << q,
                0,
            );
        }
    }
    // Project the check qubits onto |++++>.
    let mut sigma = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (b, row) in sigma.iter_mut().enumerate() {
        for (b2, entry) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..16 {
                for x2 in 0..16 {
                    acc += rho[(x | b << OUTPUT) * DIM + (x2 | b2 << OUTPUT)];
                }
            }
            *entry = acc / 16.0;
        }
    }
    sigma
}

/// The ideal output state, from the noiseless run.
fn ideal_state() -> [Complex64; 2] {
    static IDEAL: OnceLock<[Complex64; 2]> = OnceLock::new();
    *IDEAL.get_or_init(|| {
        let sigma = run(&NoiseParams::noiseless());
        let i = if sigma[0][0].re >= sigma[1][1].re { 0 } else { 1 };
        let norm = sigma[i][i].re.sqrt();
        [sigma[0][i] / norm, sigma[1][i] / norm]
    })
}

pub fn simulate(noise: &NoiseParams) -> SimOutcome {
    let sigma = run(noise);
    let p_accept = sigma[0][0].re + sigma[1][1].re;
    let psi = ideal_state();
    // Weight on the state orthogonal to the ideal one, for full precision.
    let perp = [-psi[1].conj(), psi[0].conj()];
    let mut overlap = Complex64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            overlap += perp[a].conj() * sigma[a][b] * perp[b];
        }
    }
    SimOutcome {
        p_out: (overlap.re / p_accept).max(0.0),
        p_accept,
    }
}
