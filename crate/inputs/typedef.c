typedef unsigned int foo;

foo b;
