//! Worker-splitting event generation.
//!
//! Event `i` is a pure function of `(seed, i)`, so contiguous index ranges
//! can be farmed out to any number of threads and concatenated in index
//! order; the result is byte-identical to the single-threaded run.

use retrolab_core::sim::{DetectionRecord, EventSampler, ExperimentConfig, SimError};

pub fn generate_events(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<DetectionRecord>, SimError> {
    let sampler = EventSampler::new(config)?;
    let n = config.n_events;
    if workers <= 1 || n < 2 {
        return Ok((0..n).map(|i| sampler.sample(i)).collect());
    }
    let workers = workers.min(n as usize);
    let chunk = n.div_ceil(workers as u64);
    let mut records = Vec::with_capacity(n as usize);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let sampler = &sampler;
                let start = w * chunk;
                let end = ((w + 1) * chunk).min(n);
                scope.spawn(move || (start..end).map(|i| sampler.sample(i)).collect::<Vec<_>>())
            })
            .collect();
        for handle in handles {
            records.extend(handle.join().expect("worker panicked"));
        }
    });
    Ok(records)
}
