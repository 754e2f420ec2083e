use std::process::ExitCode;

use wmit_core::acceptance;

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=acceptance::count() as u32 {
        let Some(o) = acceptance::run_one(id) else { continue };
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {} ({:.2} s): {}", o.id, o.name, o.elapsed_secs, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", acceptance::count() - failed, acceptance::count());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
