//! Projecting a balanced three-phase sample onto the rotating dq frame.
//!
//!     cargo run --example park_transform

use srfpll::signals::{normalize, ThreePhaseSample};
use srfpll::transforms::abc_to_dq;

fn main() {
    let theta = 1.0;
    let s = normalize(&ThreePhaseSample::balanced(0.0, 3.0, theta));
    println!("normalized: {:.6?} (norm {:.6})", s.channels(), s.norm());

    // zq ≈ Z·sin(θ* − θ): zero on the true angle, sign tells the direction
    for offset in [-0.2, -0.05, 0.0, 0.05, 0.2] {
        let dq = abc_to_dq(&s, theta + offset);
        println!("theta* - theta = {offset:+.2}: zd = {:.6}, zq = {:+.6}", dq.zd, dq.zq);
    }
}
