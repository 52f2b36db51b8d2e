//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod criteria;
mod support;

use std::process::ExitCode;
use std::time::{Duration, Instant};

/// A criterion check: `Ok` carries a one-line summary, `Err` the reason for
/// failure.
type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: Check,
}

fn main() -> ExitCode {
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let suite = [
        Criterion {
            id: 1,
            name: "gradient correctness",
            budget: Some(Duration::from_secs(10)),
            check: criteria::gradients,
        },
        Criterion {
            id: 2,
            name: "directed-cycle fidelity",
            budget: Some(Duration::from_secs(120)),
            check: criteria::cycles,
        },
        Criterion {
            id: 3,
            name: "tree embedding exactness",
            budget: Some(Duration::from_secs(5)),
            check: criteria::trees,
        },
        Criterion {
            id: 4,
            name: "Poincaré ball equivalence",
            budget: Some(Duration::from_secs(10)),
            check: criteria::poincare,
        },
        Criterion {
            id: 5,
            name: "DAG closure reconstruction",
            budget: Some(Duration::from_secs(600)),
            check: criteria::dag_reconstruction,
        },
        Criterion {
            id: 6,
            name: "link-prediction protocol integrity",
            budget: None,
            check: criteria::link_prediction,
        },
        Criterion {
            id: 7,
            name: "invariance suite",
            budget: None,
            check: criteria::invariance,
        },
        Criterion {
            id: 8,
            name: "CLI determinism",
            budget: None,
            check: criteria::determinism,
        },
        Criterion {
            id: 9,
            name: "mAP sanity",
            budget: None,
            check: criteria::map_sanity,
        },
        Criterion {
            id: 10,
            name: "SVG contract",
            budget: None,
            check: criteria::svg,
        },
    ];

    let mut failures = 0;
    for c in suite.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let start = Instant::now();
        let mut outcome = (c.check)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!(
                    "took {:.1} s, budget {} s",
                    elapsed.as_secs_f64(),
                    budget.as_secs()
                ));
            }
        }
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {}: {detail} [{secs:.2} s]", c.id, c.name),
            Err(reason) => {
                failures += 1;
                println!("FAIL criterion {:>2} {}: {reason} [{secs:.2} s]", c.id, c.name);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
