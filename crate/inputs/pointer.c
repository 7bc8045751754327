

 int a, *b;

 a += *b;
