from capax.cli import main

main()
