from app.cli.commands import cli


def main() -> None:
    cli(prog_name="lens-balls")


if __name__ == "__main__":
    main()
