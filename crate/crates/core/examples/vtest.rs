fn main(){
    let t0 = std::time::Instant::now();
    let r = fraclame::verify::run_suite("peridynamics", 7).unwrap();
    for c in &r.checks {
        println!("{} {}: measured {:.3e} tol {:.1e}", c.status, c.test, c.measured, c.tolerance);
    }
    println!("  [took {:?}]", t0.elapsed());
}
