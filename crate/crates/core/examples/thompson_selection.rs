//! How each acquisition rule picks from the same posterior, and how often
//! Thompson sampling picks each candidate.
//!
//! Run with: `cargo run --release --example thompson_selection`

use parallel_thompson::acquisition::{
    hallucinate, select_ei, select_ts, select_ucb, uncertainty_init, InFlightSet,
};
use parallel_thompson::gp::{Dataset, GpPosterior, Kernel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let kernel = Kernel::se(1, 0.15, 1.0).unwrap();
    let data = Dataset::new(
        vec![vec![0.1], vec![0.35], vec![0.6], vec![0.9]],
        vec![0.2, 0.9, 0.4, -0.3],
    )
    .unwrap();
    let post = GpPosterior::condition(kernel.clone(), data, 0.01, 0.0).unwrap();
    let cands: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64 / 10.0]).collect();
    let (mean, var) = post.predict(&cands).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 20_000;
    let mut counts = vec![0usize; cands.len()];
    for _ in 0..draws {
        counts[select_ts(&post, &cands, &mut rng).unwrap()] += 1;
    }
    println!("   x     mean     sd   P(TS picks x)");
    for i in 0..cands.len() {
        println!(
            "  {:.1}  {:>6.3} {:>6.3}  {:.4}",
            cands[i][0],
            mean[i],
            var[i].sqrt(),
            counts[i] as f64 / draws as f64
        );
    }

    let ucb = select_ucb(&post, &cands, 5).unwrap();
    let ei = select_ei(&post, &cands, 0.9).unwrap();
    println!("\nUCB (step 5) picks x = {:.1}", cands[ucb][0]);
    println!("EI (best 0.9) picks x = {:.1}", cands[ei][0]);

    let busy = InFlightSet::new(vec![cands[ucb].clone()]);
    let h = hallucinate(&post, &busy).unwrap();
    println!(
        "with x = {:.1} in flight, its sd drops from {:.3} to {:.3}",
        cands[ucb][0],
        post.std_dev(&cands[ucb]),
        h.std_dev(&cands[ucb])
    );

    let init = uncertainty_init(&kernel, &cands, 4, 1e-4).unwrap();
    let xs: Vec<f64> = init.iter().map(|&i| cands[i][0]).collect();
    println!("uncertainty-sampling initial design: {xs:?}");
}
