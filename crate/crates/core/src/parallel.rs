//! Seeded per-sample RNG streams and deterministic parallel reductions.
//!
//! Sample `i` always draws from stream `i` of a ChaCha8 generator keyed by the
//! master seed. Samples are grouped into fixed-size chunks, each summed
//! sequentially, and chunk results are combined in index order, so the
//! result does not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

const CHUNK: u64 = 1024;

/// RNG for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum, maximum |value| and count of exact zeros over `count` samples.
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleStats {
    pub sum: f64,
    pub sum_sq: f64,
    pub max_abs: f64,
    pub zeros: u64,
    pub count: u64,
}

impl SampleStats {
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }
}

/// Runs `f(i)` for `i in 0..count` on `workers` threads (all available when `None`).
pub fn reduce_samples<F>(count: u64, workers: Option<usize>, f: F) -> Result<SampleStats>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let run_chunk = |c: u64| -> Result<(NeumaierSum, NeumaierSum, f64, u64)> {
        let (mut s, mut s2, mut mx, mut z) = (NeumaierSum::default(), NeumaierSum::default(), 0f64, 0u64);
        for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
            let v = f(i)?;
            s.add(v);
            s2.add(v * v);
            mx = mx.max(v.abs());
            if v == 0.0 {
                z += 1;
            }
        }
        Ok((s, s2, mx, z))
    };
    let parts: Vec<Result<_>> = match workers {
        Some(1) => (0..chunks).map(run_chunk).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(|| (0..chunks).into_par_iter().map(run_chunk).collect()),
        None => (0..chunks).into_par_iter().map(run_chunk).collect(),
    };
    let (mut s, mut s2, mut mx, mut z) = (NeumaierSum::default(), NeumaierSum::default(), 0f64, 0u64);
    for p in parts {
        let (a, b, m, zz) = p?;
        s.add(a.value());
        s2.add(b.value());
        mx = mx.max(m);
        z += zz;
    }
    Ok(SampleStats { sum: s.value(), sum_sq: s2.value(), max_abs: mx, zeros: z, count })
}

/// Maps `f` over `0..count` in parallel, preserving order.
pub fn map_samples<T, F>(count: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let run = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        Some(1) => (0..count).map(&f).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn worker_count_does_not_change_result() {
        let f = |i: u64| Ok(sample_rng(7, i).gen::<f64>() * 1e-3 + 1e6);
        let a = reduce_samples(5000, Some(1), f).unwrap();
        let b = reduce_samples(5000, Some(3), f).unwrap();
        assert_eq!(a.sum.to_bits(), b.sum.to_bits());
        assert_eq!(a.sum_sq.to_bits(), b.sum_sq.to_bits());
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut s = NeumaierSum::default();
        for x in [1e16, 1.0, -1e16] {
            s.add(x);
        }
        assert_eq!(s.value(), 1.0);
    }
}
