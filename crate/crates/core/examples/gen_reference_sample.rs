fn main() {
    let xs = jensen_sharp::samples::seeded_uniform_sample(100, 10.0, 100.0, 42).unwrap();
    print!("{}", jensen_sharp::samples::format_samples(&xs, "100 draws from Uniform(10, 100)\nChaCha8Rng::seed_from_u64(42), rand_distr::Uniform"));
}
