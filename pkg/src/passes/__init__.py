# passes package
