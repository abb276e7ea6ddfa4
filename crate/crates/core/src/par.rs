//! Order-preserving parallel evaluation of pure numeric kernels over
//! schedules, capped by the COVSPEC_THREADS environment variable.

/// Worker cap: COVSPEC_THREADS when set to a positive integer, otherwise the
/// machine's parallelism capped at 8. Invalid settings fall back to 1; the
/// CLI validates the variable loudly before any computation starts.
pub(crate) fn thread_budget() -> usize {
    match std::env::var("COVSPEC_THREADS") {
        Ok(s) => s.trim().parse().ok().filter(|&n| n >= 1).unwrap_or(1),
        Err(_) => std::thread::available_parallelism().map(|n| n.get().min(8)).unwrap_or(1),
    }
}

/// Map `f` over `inputs` on up to `thread_budget()` scoped threads. Results
/// come back in input order, so downstream reductions are deterministic.
pub(crate) fn par_map<T, F>(inputs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    let threads = thread_budget().min(inputs.len().max(1));
    if threads <= 1 {
        return inputs.iter().map(|&x| f(x)).collect();
    }
    let chunk = inputs.len().div_ceil(threads);
    let mut out: Vec<Option<T>> = (0..inputs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (in_chunk, out_chunk) in inputs.chunks(chunk).zip(out.chunks_mut(chunk)) {
            let f = &f;
            scope.spawn(move || {
                for (x, slot) in in_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = Some(f(*x));
                }
            });
        }
    });
    out.into_iter().map(|slot| slot.expect("every chunk slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let ys = par_map(&xs, |x| x * x);
        assert!(ys.iter().enumerate().all(|(i, &y)| y == (i * i) as f64));
    }
}
