#include <simroots/cli.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv)
{
    CLI::App app{"Simultaneous extraction of all roots of generalized polynomials"};
    app.require_subcommand(1);

    std::string file;
    simroots::cli::options opt;
    std::string out_dir = ".";
    const std::map<std::string, simroots::cli::precision> precisions = {
        {"quad", simroots::cli::precision::quad}, {"double", simroots::cli::precision::binary64}};

    auto* run = app.add_subcommand("run", "iterate every method listed in the problem file");
    run->add_option("file", file, "problem file (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--validate-only", opt.validate_only, "check the file and exit");
    run->add_flag("--dump-normalized", opt.dump_normalized, "print the problem with defaults filled in");
    run->add_option("--precision", opt.precision, "working precision")->transform(CLI::CheckedTransformer(precisions));

    auto* compare = app.add_subcommand("compare", "side-by-side iteration table of the listed methods");
    compare->add_option("file", file, "problem file (JSON)")->required();
    compare->add_option("--out", out_dir, "output directory");
    compare->add_option("--precision", opt.precision, "working precision")->transform(CLI::CheckedTransformer(precisions));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : simroots::cli::exit_input_error;
    }
    opt.out_dir = out_dir;
    if (compare->parsed()) return simroots::cli::compare(file, opt, std::cout, std::cerr);
    return simroots::cli::run(file, opt, std::cout, std::cerr);
}
