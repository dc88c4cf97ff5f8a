//! Augmented density tensor and the single-slice contraction.
//!
//! Each retained time slice contributes one base-16 digit, the index
//! `s = 4α + β` of its forward/backward basis pair. Digits live in a ring:
//! once the tensor holds `kmax` slices, the newest slice overwrites the
//! digit position of the slice being summed out, so a step runs in place
//! with no second buffer.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::influence::{action, MemoryKernel};
use crate::linalg::CMat4;
use crate::model::OCCUPANCY;

use super::density::DensityMatrix;

/// Number of forward/backward basis pairs per slice.
pub const PAIRS: usize = 16;
/// Largest supported memory length.
pub const MAX_KMAX: usize = 8;

#[inline]
fn fwd(s: usize) -> usize {
    s / 4
}

#[inline]
fn bwd(s: usize) -> usize {
    s % 4
}

const fn occupancy(state: usize) -> usize {
    match state {
        0 => 0,
        3 => 2,
        _ => 1,
    }
}

const fn pair_tables() -> ([usize; PAIRS], [usize; PAIRS]) {
    let mut x = [0; PAIRS];
    let mut cls = [0; PAIRS];
    let mut s = 0;
    while s < PAIRS {
        let (a, b) = (occupancy(s / 4), occupancy(s % 4));
        x[s] = a + 2 - b;
        cls[s] = 3 * a + b;
        s += 1;
    }
    (x, cls)
}

/// Occupancy difference `n(α) - n(β)` shifted into `0..5`, and occupancy
/// class `3·n(α) + n(β)` in `0..9`, per pair index.
const X_INDEX: [usize; PAIRS] = pair_tables().0;
const CLASS: [usize; PAIRS] = pair_tables().1;

#[inline]
fn x_index(s: usize) -> usize {
    X_INDEX[s]
}

#[inline]
fn class(s: usize) -> usize {
    CLASS[s]
}

/// Path-sum tensor over the retained slices.
///
/// Rank 0 is the initial density matrix itself: its 16 entries belong to
/// the `t = 0` point, which carries no influence weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedTensor {
    rank: usize,
    head: usize,
    data: Vec<Complex64>,
}

impl AugmentedTensor {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let data = (0..PAIRS).map(|s| m[(fwd(s), bwd(s))]).collect();
        Self {
            rank: 0,
            head: 0,
            data,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Digit position of the slice `age` steps older than the newest.
    #[inline]
    fn position(&self, age: usize) -> usize {
        (self.head + self.rank - age) % self.rank
    }

    /// Sums all indices except the newest slice.
    pub fn reduced(&self) -> DensityMatrix {
        let mut acc = [Complex64::new(0.0, 0.0); PAIRS];
        if self.rank == 0 {
            acc.copy_from_slice(&self.data);
        } else {
            let lo_len = PAIRS.pow(self.head as u32);
            let hi_len = PAIRS.pow((self.rank - 1 - self.head) as u32);
            let mut idx = 0;
            for _ in 0..hi_len {
                for a in acc.iter_mut() {
                    *a += self.data[idx..idx + lo_len].iter().sum::<Complex64>();
                    idx += lo_len;
                }
            }
        }
        let mut m = CMat4::zeros();
        for (s, v) in acc.iter().enumerate() {
            m[(fwd(s), bwd(s))] = *v;
        }
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// Precomputed weights for one `(unitary, kernel)` pair.
struct StepTables {
    /// Free propagator times the self-interaction weight of the new point,
    /// indexed `[s_new][s_prev]`.
    free: [[Complex64; PAIRS]; PAIRS],
    /// `η_Δ n(α) - η_Δ* n(β)` per retained separation Δ = 1..kmax-1,
    /// stored at `Δ - 1`.
    coupling: Vec<[Complex64; PAIRS]>,
    /// Weight of the outgoing slice (separation kmax) per occupancy
    /// difference of the new point and class of the outgoing point.
    outgoing: [[Complex64; 9]; 5],
}

impl StepTables {
    fn new(u: &CMat4, kernel: &MemoryKernel) -> Self {
        let mut free = [[Complex64::new(0.0, 0.0); PAIRS]; PAIRS];
        for (sn, row) in free.iter_mut().enumerate() {
            let self_weight = action(kernel.eta(0), fwd(sn), bwd(sn), fwd(sn), bwd(sn)).exp();
            for (sp, v) in row.iter_mut().enumerate() {
                *v = u[(fwd(sn), fwd(sp))] * u[(bwd(sn), bwd(sp))].conj() * self_weight;
            }
        }
        let coupling = (1..kernel.kmax)
            .map(|delta| {
                let eta = kernel.eta(delta);
                let mut g = [Complex64::new(0.0, 0.0); PAIRS];
                for (s, v) in g.iter_mut().enumerate() {
                    *v = eta * OCCUPANCY[fwd(s)] - eta.conj() * OCCUPANCY[bwd(s)];
                }
                g
            })
            .collect();
        let eta_k = kernel.eta(kernel.kmax);
        let mut outgoing = [[Complex64::new(0.0, 0.0); 9]; 5];
        for (xi, row) in outgoing.iter_mut().enumerate() {
            let x = xi as f64 - 2.0;
            for (cls, v) in row.iter_mut().enumerate() {
                let (a, b) = ((cls / 3) as f64, (cls % 3) as f64);
                *v = (-x * (eta_k * a - eta_k.conj() * b)).exp();
            }
        }
        Self {
            free,
            coupling,
            outgoing,
        }
    }
}

/// Digit positions of the `count` newest slices with their coupling
/// tables, outermost loop first. The smallest stride goes innermost so that
/// neighbouring tails share cache lines.
fn tail_positions<'t>(
    a: &AugmentedTensor,
    count: usize,
    tables: &'t StepTables,
) -> Vec<(usize, &'t [Complex64; PAIRS])> {
    let mut positions: Vec<_> = (0..count)
        .map(|age| (a.position(age), &tables.coupling[age]))
        .collect();
    positions.sort_by(|x, y| y.0.cmp(&x.0));
    positions
}

/// `exp(-x Φ)` for `x = -2..=2`.
#[inline]
fn powers(phi: Complex64) -> [Complex64; 5] {
    let e1 = (-phi).exp();
    let e2 = e1 * e1;
    let one = Complex64::new(1.0, 0.0);
    [one / e2, one / e1, one, e1, e2]
}

/// Enumerates every combination of digits at `positions`, calling
/// `leaf(index, Φ, s_prev)`, where Φ accumulates the coupling tables
/// attached to each position and `s_prev` is the digit at `head`.
fn for_each_tail<F>(positions: &[(usize, &[Complex64; PAIRS])], head: usize, leaf: &mut F)
where
    F: FnMut(usize, Complex64, usize),
{
    fn recurse<F: FnMut(usize, Complex64, usize)>(
        positions: &[(usize, &[Complex64; PAIRS])],
        head: usize,
        idx: usize,
        phi: Complex64,
        prev: usize,
        leaf: &mut F,
    ) {
        match positions.split_first() {
            None => leaf(idx, phi, prev),
            Some((&(pos, table), rest)) => {
                let stride = PAIRS.pow(pos as u32);
                for d in 0..PAIRS {
                    let phi_d = phi + table[d];
                    let prev_d = if pos == head { d } else { prev };
                    recurse(rest, head, idx + d * stride, phi_d, prev_d, leaf);
                }
            }
        }
    }
    recurse(positions, head, 0, Complex64::new(0.0, 0.0), 0, leaf);
}

/// Advances the path sum by one time slice.
///
/// The new slice is weighted by the free propagator `u ⊗ u*` and by the
/// influence action linking it to itself and to every retained slice. When
/// the tensor already holds `kernel.kmax` slices, the oldest one is summed
/// out, dropping its correlations with all later points.
pub fn contract_step(
    mut a: AugmentedTensor,
    u: &CMat4,
    kernel: &MemoryKernel,
) -> Result<AugmentedTensor> {
    let kmax = kernel.kmax;
    if kmax == 0 || kmax > MAX_KMAX {
        return Err(Error::Config(format!("kmax {kmax} outside 1..={MAX_KMAX}")));
    }
    let tables = StepTables::new(u, kernel);

    if a.rank == 0 {
        let mut out = vec![Complex64::new(0.0, 0.0); PAIRS];
        for (sn, o) in out.iter_mut().enumerate() {
            *o = (0..PAIRS).map(|s0| tables.free[sn][s0] * a.data[s0]).sum();
        }
        return Ok(AugmentedTensor {
            rank: 1,
            head: 0,
            data: out,
        });
    }

    if a.rank < kmax {
        // growth: append a digit at position `rank`
        let new_pos = a.rank;
        let new_len = PAIRS.pow((a.rank + 1) as u32);
        a.data
            .try_reserve_exact(new_len - a.data.len())
            .map_err(|e| {
                Error::Config(format!(
                    "cannot allocate augmented tensor of {new_len} entries: {e}"
                ))
            })?;
        a.data.resize(new_len, Complex64::new(0.0, 0.0));
        let positions = tail_positions(&a, a.rank, &tables);
        let stride = PAIRS.pow(new_pos as u32);
        let head = a.head;
        let data = &mut a.data;
        for_each_tail(&positions, head, &mut |idx, phi, prev| {
            let e = powers(phi);
            let v = data[idx];
            // idx itself is written last since it holds the source value
            for sn in (1..PAIRS).chain(std::iter::once(0)) {
                data[idx + sn * stride] = tables.free[sn][prev] * e[x_index(sn)] * v;
            }
        });
        a.rank += 1;
        a.head = new_pos;
        return Ok(a);
    }

    if kmax == 1 {
        // the outgoing slice is also the previous point of the propagator
        let old = std::mem::take(&mut a.data);
        let mut out = vec![Complex64::new(0.0, 0.0); PAIRS];
        for (sn, o) in out.iter_mut().enumerate() {
            let xi = x_index(sn);
            *o = (0..PAIRS)
                .map(|s0| tables.free[sn][s0] * tables.outgoing[xi][class(s0)] * old[s0])
                .sum();
        }
        return Ok(AugmentedTensor {
            rank: 1,
            head: 0,
            data: out,
        });
    }

    // iterative: sum out the oldest slice, store the newest in its place
    let out_pos = a.position(kmax - 1);
    let positions = tail_positions(&a, kmax - 1, &tables);
    let stride = PAIRS.pow(out_pos as u32);
    let head = a.head;
    let data = &mut a.data;
    for_each_tail(&positions, head, &mut |idx, phi, prev| {
        let mut by_class = [Complex64::new(0.0, 0.0); 9];
        for s_old in 0..PAIRS {
            by_class[class(s_old)] += data[idx + s_old * stride];
        }
        let e = powers(phi);
        let mut weighted = [Complex64::new(0.0, 0.0); 5];
        for (xi, w) in weighted.iter_mut().enumerate() {
            let sum: Complex64 = tables.outgoing[xi]
                .iter()
                .zip(by_class.iter())
                .map(|(f, v)| f * v)
                .sum();
            *w = e[xi] * sum;
        }
        for sn in 0..PAIRS {
            data[idx + sn * stride] = tables.free[sn][prev] * weighted[x_index(sn)];
        }
    });
    a.head = out_pos;
    Ok(a)
}
