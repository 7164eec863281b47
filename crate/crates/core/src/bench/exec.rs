/*
Copyright 2026 The errt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How independent trials are scheduled. Results come back in input order
/// either way, so the schedule never changes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool with the given worker count (all cores when `None`).
    /// Runs sequentially when the `parallel` feature is off.
    Parallel { workers: Option<usize> },
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(1) => Execution::Sequential,
            w => Execution::Parallel { workers: w },
        }
    }

    pub fn map<I, T, F>(self, items: Vec<I>, f: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel { workers } => {
                use rayon::prelude::*;
                let run = || items.into_par_iter().map(&f).collect();
                match workers {
                    Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(run),
                    None => run(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel { .. } => items.into_iter().map(f).collect(),
        }
    }
}

/// Seed number `stream` derived from `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng.gen()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_agree() {
        let items: Vec<u64> = (0..200).collect();
        let f = |i: u64| derive_seed(i, 3).wrapping_mul(i);
        let a = Execution::Sequential.map(items.clone(), f);
        let b = Execution::Parallel { workers: Some(3) }.map(items.clone(), f);
        let c = Execution::Parallel { workers: None }.map(items, f);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 9), derive_seed(5, 9));
    }
}
