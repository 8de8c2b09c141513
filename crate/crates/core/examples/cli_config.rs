//! Driving the command-line front end in process.

use abq_forms::cli::run;

fn main() {
    let config = std::env::temp_dir().join("abq_example.toml");
    std::fs::write(&config, "alpha = 0.5\nbracket = [0.1, 10.0]\n[beta]\nb00 = -9.869604401089358\nb11 = 9.869604401089358\n")
        .expect("write config");
    let path = config.to_str().expect("utf-8 path");
    for args in [
        vec!["abq", "reduce", "--raw", "2.7"],
        vec!["abq", "norms", "--alpha", "0.3", "--k", "-1", "--lambda", "1"],
        vec!["abq", "boundstates", "--config", path],
        vec!["abq", "norms", "--alpha", "1.5"],
    ] {
        let code = run(args.iter().copied());
        println!("exit code {code}\n");
    }
    let _ = std::fs::remove_file(config);
}
