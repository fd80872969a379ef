//! Parallel sweep execution with a deterministic merge: grid point i
//! always lands in output slot i no matter which worker ran it.

pub fn run_indexed<T, F>(count: usize, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.max(1).min(count.max(1));
    let mut slots: Vec<Option<T>> = std::iter::repeat_with(|| None).take(count).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let job = &job;
            handles.push(scope.spawn(move || {
                let mut acc = Vec::new();
                let mut i = w;
                while i < count {
                    acc.push((i, job(i)));
                    i += workers;
                }
                acc
            }));
        }
        for handle in handles {
            for (i, value) in handle.join().expect("sweep worker panicked") {
                slots[i] = Some(value);
            }
        }
    });
    slots.into_iter().map(|slot| slot.expect("every index visited")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_by_index_for_any_worker_count() {
        let expect: Vec<usize> = (0..37).map(|i| i * i).collect();
        for workers in [1, 2, 3, 8, 64] {
            assert_eq!(run_indexed(37, workers, |i| i * i), expect);
        }
    }

    #[test]
    fn empty_grid_is_fine() {
        let out: Vec<usize> = run_indexed(0, 4, |i| i);
        assert!(out.is_empty());
    }
}
