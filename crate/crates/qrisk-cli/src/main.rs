fn main() {
    println!("qrisk");
}
