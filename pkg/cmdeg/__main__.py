import sys

from cmdeg.management import main

main(["cmdeg", *sys.argv[1:]])
