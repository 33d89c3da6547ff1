//! Task runner for independent jobs.
//!
//! With the `parallel` feature, jobs run on a rayon pool of the requested
//! size; without it (or with one thread) they run in order on the calling
//! thread. Results always come back in task order.

/// Worker count used when the caller asks for `0`.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Apply `job` to every task, returning results in task order.
#[cfg(feature = "parallel")]
pub fn map_tasks<T, R, J>(tasks: &[T], threads: usize, job: J) -> Vec<R>
where
    T: Sync,
    R: Send,
    J: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let threads = if threads == 0 {
        default_threads()
    } else {
        threads
    };
    if threads <= 1 || tasks.len() <= 1 {
        return tasks.iter().map(job).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| tasks.par_iter().map(&job).collect()),
        Err(_) => tasks.iter().map(job).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_tasks<T, R, J>(tasks: &[T], _threads: usize, job: J) -> Vec<R>
where
    T: Sync,
    R: Send,
    J: Fn(&T) -> R + Sync + Send,
{
    tasks.iter().map(job).collect()
}
