//! Thread-pool sizing via the SPECSUB_THREADS environment variable.

use rayon::ThreadPool;

/// Builds a rayon pool honoring `SPECSUB_THREADS` (default: all cores; set 1
/// for bit-stable timing runs).
pub fn pool() -> ThreadPool {
    let threads = std::env::var("SPECSUB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(num_threads);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction cannot fail with a positive size")
}

fn num_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
