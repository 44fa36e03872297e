//! `fracmax kernel-table`: samples of g_{1-α}, g_{1-α,m} and h_m on the
//! configured mesh, for the ladder `m, 4m, 16m, 64m`.

use std::path::Path;

use fracmax::kernels::{g_kernel, l1_distance_to_power, Mollifier, MollifierFamily};

use crate::config::RunConfig;
use crate::output::{num, Csv};
use crate::{write_file, CliError};

pub const RUNGS: u32 = 4;

pub fn m_ladder(m: u32) -> Vec<u32> {
    (0..RUNGS)
        .filter_map(|k| m.checked_mul(4u32.pow(k)))
        .collect()
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let family = config.kernel_family.unwrap_or(MollifierFamily::Exponential);
    let mesh = config.mesh();
    let ladder = m_ladder(config.m);
    let mollifiers = ladder
        .iter()
        .map(|&m| Mollifier::new(family, config.alpha, m))
        .collect::<fracmax::Result<Vec<_>>>()?;

    let mut header = vec!["t".to_string(), "g_power".to_string()];
    header.extend(ladder.iter().map(|m| format!("g_reg_m{m}")));
    header.extend(ladder.iter().map(|m| format!("h_m{m}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut samples = Csv::new(&header);
    // g_{1-α} is infinite at t = 0, so the table starts at t_1
    for t in mesh.nodes().skip(1) {
        let mut row = vec![num(t), num(g_kernel(1.0 - config.alpha, t)?)];
        row.extend(mollifiers.iter().map(|k| num(k.regularized_at(t))));
        row.extend(mollifiers.iter().map(|k| num(k.density(t))));
        samples.row(&row);
    }
    write_file(dir, "kernel_samples.csv", &samples.finish())?;

    let mut distances = Csv::new(&["m", "l1_distance"]);
    for (m, k) in ladder.iter().zip(&mollifiers) {
        distances.row(&[m.to_string(), num(l1_distance_to_power(k, &mesh)?)]);
    }
    write_file(dir, "kernel_l1.csv", &distances.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_geometric() {
        assert_eq!(m_ladder(4), vec![4, 16, 64, 256]);
        assert_eq!(m_ladder(1), vec![1, 4, 16, 64]);
    }
}
