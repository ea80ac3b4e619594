//! Worker count from `EXCITON_INDEX_THREADS` and a scoped parallel map.

use std::num::NonZeroUsize;
use std::thread;

use crate::failure::Failure;

pub const THREADS_VAR: &str = "EXCITON_INDEX_THREADS";

/// Parses the variable's value; unset or `0` means one worker per core.
pub fn worker_count(value: Option<&str>) -> Result<usize, Failure> {
    let auto = || thread::available_parallelism().map_or(1, NonZeroUsize::get);
    match value.map(str::trim) {
        None | Some("") => Ok(auto()),
        Some(v) => match v.parse::<usize>() {
            Ok(0) => Ok(auto()),
            Ok(n) => Ok(n),
            Err(_) => Err(Failure::usage(format!(
                "{THREADS_VAR} must be a non-negative integer, got `{v}`"
            ))),
        },
    }
}

/// Applies `f` to every item on up to `threads` workers; results keep input order.
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    items
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(threads)
                        .map(|(i, x)| (i, f(x)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}
