import sys

from app import create_app

main = create_app()

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
