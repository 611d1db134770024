from marsupial.cli import main

main()
