use std::path::Path;
use std::time::Duration;

use super::{solve_exact, solve_sa, SaConfig, SolverOutcome};
use crate::graph_qubo::{
    parse_qubo, parse_qubo_json, serialize_qubo, serialize_qubo_json, QuboProblem,
};
use crate::{Error, Result};

/// Largest accepted gap between a reported and a recomputed sample energy.
pub const SAMPLE_ENERGY_TOLERANCE: f64 = 1e-6;

/// Anything that turns a QUBO into a [`SolverOutcome`].
pub trait Sampler {
    fn name(&self) -> &str;
    fn sample(&self, q: &QuboProblem) -> Result<SolverOutcome>;
}

pub struct ExactSampler;

impl Sampler for ExactSampler {
    fn name(&self) -> &str {
        "exact"
    }

    fn sample(&self, q: &QuboProblem) -> Result<SolverOutcome> {
        solve_exact(q)
    }
}

pub struct SimulatedAnnealingSampler(pub SaConfig);

impl Sampler for SimulatedAnnealingSampler {
    fn name(&self) -> &str {
        "sa"
    }

    fn sample(&self, q: &QuboProblem) -> Result<SolverOutcome> {
        solve_sa(q, &self.0)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes `q` for an external sampler: JSON for `.json` paths, the `qubo`
/// text format otherwise.
pub fn export_for_sampler(q: &QuboProblem, path: &Path) -> Result<()> {
    let bytes = if is_json(path) {
        serialize_qubo_json(q)
    } else {
        serialize_qubo(q)
    };
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Reads back a problem written by [`export_for_sampler`].
pub fn read_exported(path: &Path) -> Result<QuboProblem> {
    let bytes = std::fs::read(path)?;
    if is_json(path) {
        parse_qubo_json(&bytes)
    } else {
        parse_qubo(&bytes)
    }
}

/// Renders samples as `<bitstring> <energy> <count>` lines.
pub fn format_samples(samples: &[(Vec<u8>, f64, u64)]) -> String {
    let mut out = String::from("# bitstring energy count\n");
    for (bits, e, count) in samples {
        let s: String = bits
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        out.push_str(&format!("{s} {e:.16e} {count}\n"));
    }
    out
}

/// Validates sample lines against `q` and keeps the lowest-energy sample
/// (earliest line on ties).
pub fn parse_samples(q: &QuboProblem, text: &str) -> Result<SolverOutcome> {
    let adj = q.adjacency();
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut read_energies = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line, message };
        let mut tok = l.split_whitespace();
        let bitstring = tok.next().ok_or_else(|| bad("missing bitstring".into()))?;
        let reported: f64 = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing or invalid energy".into()))?;
        let count: u64 = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("missing or invalid count".into()))?;
        if tok.next().is_some() {
            return Err(bad("expected '<bitstring> <energy> <count>'".into()));
        }
        if count == 0 {
            return Err(bad("count must be positive".into()));
        }
        if bitstring.len() != q.n {
            return Err(bad(format!(
                "bitstring has {} bits, problem has {}",
                bitstring.len(),
                q.n
            )));
        }
        let bits = bitstring
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0u8),
                b'1' => Ok(1u8),
                _ => Err(bad(format!("invalid bit '{}'", b as char))),
            })
            .collect::<Result<Vec<u8>>>()?;
        let actual = q.energy_with(&adj, &bits);
        if !((reported - actual).abs() <= SAMPLE_ENERGY_TOLERANCE) {
            return Err(Error::Integrity {
                line,
                message: format!(
                    "reported energy {reported} but the assignment has energy {actual}"
                ),
            });
        }
        read_energies.push(actual);
        if best.as_ref().is_none_or(|(_, e)| actual < *e) {
            best = Some((bits, actual));
        }
    }
    let (best, best_energy) =
        best.ok_or_else(|| Error::InvalidData("sample file contains no samples".into()))?;
    Ok(SolverOutcome {
        best,
        best_energy,
        read_energies,
        elapsed: Duration::ZERO,
        solver_name: "external".into(),
        seed: None,
    })
}

pub fn import_samples(q: &QuboProblem, path: &Path) -> Result<SolverOutcome> {
    let text = std::fs::read_to_string(path)?;
    parse_samples(q, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_qubo::{build_qubo, Edge, PixelGraph};

    fn single_edge() -> QuboProblem {
        build_qubo(
            &PixelGraph {
                width: 2,
                height: 1,
                edges: vec![Edge {
                    i: 0,
                    j: 1,
                    weight: 1.0,
                }],
                sigma_hat: 0.0,
            },
            0.1,
        )
    }

    #[test]
    fn export_round_trip() {
        let dir = std::env::temp_dir().join(format!("qmseg-export-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let q = single_edge();
        for name in ["p.qubo", "p.json"] {
            let path = dir.join(name);
            export_for_sampler(&q, &path).unwrap();
            assert_eq!(read_exported(&path).unwrap(), q);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn accepts_consistent_samples() {
        let q = single_edge();
        let out = parse_samples(&q, "# from annealer\n10 1.1 3\n00 0 5\n").unwrap();
        assert_eq!(out.best, vec![0, 0]);
        assert_eq!(out.best_energy, 0.0);
        assert_eq!(out.read_energies.len(), 2);
    }

    #[test]
    fn wrong_energy_is_an_integrity_error() {
        let q = single_edge();
        match parse_samples(&q, "# header\n00 5.0 1\n").unwrap_err() {
            Error::Integrity { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_sample_lines() {
        let q = single_edge();
        assert!(parse_samples(&q, "0 0 1\n").is_err());
        assert!(parse_samples(&q, "0x 0 1\n").is_err());
        assert!(parse_samples(&q, "00 0\n").is_err());
        assert!(parse_samples(&q, "").is_err());
    }

    #[test]
    fn formatted_samples_parse_back() {
        let q = single_edge();
        let text = format_samples(&[(vec![1, 1], q.energy(&[1, 1]).unwrap(), 2)]);
        assert_eq!(parse_samples(&q, &text).unwrap().best, vec![1, 1]);
    }

    #[test]
    fn trait_objects_dispatch() {
        let q = single_edge();
        let samplers: Vec<Box<dyn Sampler>> = vec![
            Box::new(ExactSampler),
            Box::new(SimulatedAnnealingSampler(SaConfig {
                reads: 4,
                sweeps: 10,
                ..SaConfig::default()
            })),
        ];
        for s in samplers {
            let out = s.sample(&q).unwrap();
            assert_eq!(out.solver_name, s.name());
            assert!(out.best_energy.abs() < 1e-12);
        }
    }
}
