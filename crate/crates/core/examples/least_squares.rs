// The rank-revealing least-squares solver on its own, including what happens
// to a column that duplicates an earlier one.

use std::error::Error;

use labor_panel::solver::{solve_ols, DEFAULT_RTOL};
use nalgebra::{DMatrix, DVector};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // y = 1 + 2a - b exactly, plus a third column equal to a + b.
    let a = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    let b = [1.0, 0.0, 2.0, 1.0, 3.0, 2.0];
    let x = DMatrix::from_fn(6, 4, |r, c| match c {
        0 => 1.0,
        1 => a[r],
        2 => b[r],
        _ => a[r] + b[r],
    });
    let noise = [0.1, -0.1, 0.05, -0.05, 0.0, 0.0];
    let y = DVector::from_fn(6, |r, _| 1.0 + 2.0 * a[r] - b[r] + noise[r]);

    let sol = solve_ols(&x, &y, DEFAULT_RTOL)?;
    println!("dropped columns: {:?}", sol.dropped_columns);
    for (k, &c) in sol.retained.iter().enumerate() {
        println!("beta[{c}] = {:>9.5}  se = {:.5}", sol.beta[k], sol.cov[(k, k)].sqrt());
    }
    println!("sigma2 = {:.6}, ssr = {:.6}, dof = {}", sol.sigma2, sol.ssr, sol.n - sol.p);
    assert_eq!(sol.dropped_columns, vec![3]);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
