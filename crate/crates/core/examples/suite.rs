//! The randomized property suites, once clean and once with a broken sheaf injected.

use shv::suite::{run_suites, SuiteConfig};

fn main() {
    for inject in [false, true] {
        let r = run_suites(&SuiteConfig {
            count: 50,
            inject_broken_fixture: inject,
            ..SuiteConfig::default()
        });
        println!("inject broken fixture: {inject}, pass: {}", r.pass);
        for s in &r.suites {
            print!("  {}: {}/{} failing", s.name, s.failures, s.instances);
            match &s.first_failure {
                Some(f) => println!(", shrunk to {:?}: {}", f.shrunk_cells, f.shrunk_message),
                None => println!(),
            }
        }
    }
}
