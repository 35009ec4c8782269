#![allow(dead_code)]

use graphonlab::{CounterRng, StepGraphon};

/// Step graphon with `1..=max_parts` parts, measures bounded away from 0 and
/// uniform values, drawn from the counter RNG.
pub fn random_graphon(seed: u64, max_parts: usize) -> StepGraphon<f64> {
    let rng = CounterRng::new(seed).stream(0xA11CE);
    let m = 1 + rng.below(0, 0, max_parts as u64) as usize;
    let raw: Vec<f64> = (0..m).map(|i| 0.2 + rng.unit(1, i as u64)).collect();
    let total: f64 = raw.iter().sum();
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = rng.unit(2 + i as u64, j as u64);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepGraphon::new(raw.iter().map(|x| x / total).collect(), values).unwrap()
}
