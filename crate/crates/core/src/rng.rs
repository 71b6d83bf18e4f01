//! Deterministic counter-based random streams.
//!
//! Every event index owns an independent stream that is a pure function of
//! `(seed, index)`, so a simulation produces the same records no matter how
//! event indices are split across workers. The generator is the splitmix64
//! finalizer over an additive counter; stream keys are derived by double
//! avalanche mixing of seed and index.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A per-event random stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// The stream for one event: a pure function of `(seed, index)`.
    pub fn for_event(seed: u64, index: u64) -> Self {
        let key = mix(mix(seed ^ GOLDEN_GAMMA) ^ index.wrapping_mul(GOLDEN_GAMMA));
        Self { state: key }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// A pair of independent standard normal draws (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // Guard u1 away from zero so the logarithm stays finite.
        let u1 = self.uniform().max(1.0 / 9007199254740992.0);
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = core::f64::consts::TAU * u2;
        (radius * libm::cos(angle), radius * libm::sin(angle))
    }
}
