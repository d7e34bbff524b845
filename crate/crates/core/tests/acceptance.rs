use k3gw::checks::{run, Level};

fn main() {
    let level = match std::env::var("K3GW_ACCEPTANCE").as_deref() {
        Ok("quick") => Level::Quick,
        _ => Level::Full,
    };
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let mut failed = 0;
            for id in 1..=10 {
                let o = run(id, level);
                let tag = if o.passed { "PASS" } else { "FAIL" };
                println!("{tag} criterion {id}: {} ({:.1}s) {}", o.name, o.seconds, o.detail);
                failed += usize::from(!o.passed);
            }
            failed
        })
        .expect("spawn");
    let failed = worker.join().expect("acceptance worker panicked");
    if failed > 0 {
        std::process::exit(1);
    }
}
