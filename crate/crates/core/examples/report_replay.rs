// Build a report in code, save it, and replay it the way `trikit verify` does.

use std::error::Error;

use trikit::cli::{replay, run_job, Job, Report};
use trikit::solid::{AxisBox, Strategy};
use trikit::Point3;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let job = Job::Slice {
        boxes: vec![AxisBox::new(Point3::new(0.0, 0.0, 0.0), Point3::new(3.0, 1.0, 2.0))?],
        strategy: Strategy::MultiSection(3),
    };
    let outcome = run_job(job)?;
    let text = serde_json::to_string_pretty(&outcome.report)?;
    println!("report is {} bytes, passed: {}", text.len(), outcome.report.passed);

    let saved: Report = serde_json::from_str(&text)?;
    let check = replay(&saved)?;
    for c in &check.report.checks {
        println!("  {:<18} {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    if !check.report.passed {
        return Err("replay did not reproduce the report".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
