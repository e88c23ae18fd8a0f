// Drive the config-based runner directly, the same path the hardylab
// binary uses. The outcome carries the JSON report, its CSV flattening,
// and the aggregate verdict.

use hardylab::runner::{execute, Command, RunConfig};
use serde_json::{json, Map};

fn main() {
    let mut parameters = Map::new();
    parameters.insert("n".into(), json!(64));
    parameters.insert("m".into(), json!(256));

    let config = RunConfig {
        schema: 1,
        command: Command::Theta,
        preset: Some("paper-example".into()),
        parameters,
        output: None,
    };

    let outcome = execute(&config).unwrap();
    println!("all_pass = {}", outcome.all_pass);

    for row in outcome.report["checks"].as_array().unwrap() {
        println!(
            "{:32} value {:>12} tol {:>9} pass {}",
            row["name"].as_str().unwrap(),
            row["value"].to_string(),
            row["tol"].to_string(),
            row["pass"]
        );
    }

    let header = outcome.csv.lines().next().unwrap();
    println!("csv header: {header}");
}
