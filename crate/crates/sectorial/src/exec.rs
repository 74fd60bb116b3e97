//! Scoped-thread executor whose results do not depend on the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use sectorial_core::exec::Executor;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SECTOR_EXT_THREADS";

/// Runs `map_indexed` on up to `threads` scoped workers pulling indices from a shared
/// counter; results are reassembled in index order.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    threads: usize,
}

impl Threaded {
    pub fn new(threads: usize) -> Self {
        Threaded { threads: threads.max(1) }
    }

    /// Available parallelism, capped by `SECTOR_EXT_THREADS` when set.
    pub fn from_env() -> Result<Self, String> {
        let avail = thread::available_parallelism().map_or(1, |n| n.get());
        match std::env::var(THREADS_VAR) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Self::new(n.min(avail))),
                _ => Err(format!("{THREADS_VAR}='{v}' must be a positive integer")),
            },
            Err(_) => Ok(Self::new(avail)),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for Threaded {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.threads.min(n);
        if workers <= 1 {
            return (0..n).map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut done = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= n {
                                break done;
                            }
                            done.push((i, f(i)));
                        }
                    })
                })
                .collect();
            for h in handles {
                for (i, v) in h.join().expect("worker thread panicked") {
                    slots[i] = Some(v);
                }
            }
        });
        slots.into_iter().map(|v| v.expect("every index is evaluated once")).collect()
    }
}
