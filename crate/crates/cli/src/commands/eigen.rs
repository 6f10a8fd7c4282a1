//! `eigen-report`: analytic eigenvalue table for every sector below the
//! cutoff, with spectral residuals away from the exceptional point and
//! Jordan-block orders at it.

use num_complex::Complex64;

use lossy_coupler::effective::{eigenvalue, h_eff, right_eigenvector};
use lossy_coupler::{FockSpace, Operator};

use super::core_err;
use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_output};

pub fn run(cfg: &ExperimentConfig) -> Result<(), String> {
    let params = cfg.params();
    let space = FockSpace::new(cfg.n_max);
    let h = h_eff(&params, space);
    let at_ep = params.regime().is_at_ep();

    let mut csv = String::from(if at_ep {
        "j,k,re_lambda,im_lambda,jordan_block_order\n"
    } else {
        "j,k,re_lambda,im_lambda,residual_norm\n"
    });

    for j in 0..=cfg.n_max {
        for k in 0..=(cfg.n_max - j) {
            let lambda = eigenvalue(j, k, &params);
            csv.push_str(&format!("{j},{k},"));
            csv.push_str(&fmt_f64(lambda.re));
            csv.push(',');
            csv.push_str(&fmt_f64(lambda.im));
            csv.push(',');
            if at_ep {
                csv.push_str(&jordan_block_order(&h, space, j + k).to_string());
            } else {
                let v = right_eigenvector(j, k, &params, space).map_err(core_err)?;
                let residual = (&h.apply(&v).map_err(core_err)? - &v.scaled(lambda)).norm()
                    / v.norm();
                csv.push_str(&fmt_f64(residual));
            }
            csv.push('\n');
        }
    }
    write_output(cfg.output_path.as_deref(), &csv)
}

/// Nilpotency index of `H_eff - lambda_N I` restricted to the sector with
/// total photon number `n`: the size of the Jordan block the sector forms at
/// the exceptional point.
fn jordan_block_order(h: &Operator, space: FockSpace, n: usize) -> usize {
    let sector: Vec<usize> = (0..space.dim())
        .filter(|&i| {
            let (na, nb) = space.occupation(i).expect("index in range");
            na + nb == n
        })
        .collect();
    let dim = sector.len();
    // the coalesced eigenvalue -i gamma n / 2 equals the mean of the sector
    // diagonal (occupations average to n/2 across the sector)
    let lambda = sector
        .iter()
        .map(|&i| h.matrix()[[i, i]])
        .sum::<Complex64>()
        / dim as f64;

    let mut block = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (r, &i) in sector.iter().enumerate() {
        for (c, &j) in sector.iter().enumerate() {
            block[r][c] = h.matrix()[[i, j]];
            if r == c {
                block[r][c] -= lambda;
            }
        }
    }
    let scale = block
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.norm()))
        .max(1e-30);

    let mut power = block.clone();
    for order in 1..=dim {
        let max = power
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.norm()));
        if max <= 1e-10 * scale.powi(order as i32) {
            return order;
        }
        // power <- power * block
        let mut next = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..dim {
                    acc += power[r][m] * block[m][c];
                }
                next[r][c] = acc;
            }
        }
        power = next;
    }
    dim + 1
}
