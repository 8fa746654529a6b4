//! Small numeric helpers shared across modules: log-space accumulation,
//! compensated summation, and deterministic seed splitting.

/// Mixes a run seed with a stream index into an independent-looking child
/// seed (splitmix64 finalizer over a golden-ratio salt). Used to give every
/// parallel work item — a (node, walk) slot, an epoch, a rescue draw — its
/// own RNG stream so results do not depend on scheduling order.
pub(crate) fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `ln(e^a + e^b)` without overflow; tolerates `-inf` in either slot.
pub(crate) fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{v_i}` over a slice; `-inf` for an empty or all `-inf` input.
pub(crate) fn logsumexp(vals: &[f64]) -> f64 {
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = vals.iter().map(|v| (v - hi).exp()).sum();
    hi + sum.ln()
}

/// Neumaier-compensated accumulator: like Kahan summation but also correct
/// when the next addend is larger than the running sum, which is exactly
/// what alternating series with growing terms produce.
#[derive(Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
