fn main() { motifstat::cli::run() }
