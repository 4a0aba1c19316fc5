use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when `threads` > 1, keeping input order.
pub fn map_ordered<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match threads {
        Some(n) if n > 1 && items.len() > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool");
            pool.install(|| items.par_iter().map(&f).collect())
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..200).collect();
        let seq = map_ordered(&items, None, |x| x * x);
        let par = map_ordered(&items, Some(8), |x| x * x);
        assert_eq!(seq, par);
    }
}
