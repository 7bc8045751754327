int x;
x = 1;
;
// extra =
     a = = b+c;
