//! Drive a command through the library: Hecke matrices land in a JSON cache
//! and the second run reads them back.

use padic_lfun::cli::{run, Command, Overrides};

fn main() {
    let dir = std::env::temp_dir().join("padic-lab-example-cache");
    let o = Overrides {
        level: Some(37),
        op: Some("T2".into()),
        cache_dir: Some(dir.clone()),
        ..Overrides::default()
    };
    for _ in 0..2 {
        let r = run(Command::Hecke, o.clone());
        println!("source {} status {:?}", r.data["source"], r.status);
    }
    let r = run(Command::Hecke, o);
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
    let _ = std::fs::remove_dir_all(dir);
}
