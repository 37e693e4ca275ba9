use clap::Parser;

fn main() {
    let cli = centered_partition_cli::Cli::parse();
    match centered_partition_cli::run(&cli) {
        Ok(paths) => print!("{}", centered_partition_cli::commands::describe(&paths)),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
