// Render the published estimates in each output format.

use std::error::Error;

use labor_panel::report::{published_table, render, Format};

fn show(format: Format) -> String {
    render(&published_table(), format)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for format in [Format::Text, Format::Csv] {
        println!("{}", show(format));
    }
    Ok(())
}

/// `cargo run --example render_table -- json` prints one format only.
fn main() {
    let result = match std::env::args().nth(1) {
        Some(arg) => arg.parse::<Format>().map(|f| print!("{}", show(f))).map_err(Into::into),
        None => run_example(),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
